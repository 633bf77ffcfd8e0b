#pragma once

// Line-oriented circuit description language.
//
//   # comment
//   SOURCE pol=<H|V|D|A> oam=<signed int>
//   HWP angle=<degrees>                 (plate angle; 22.5 is the polarization Hadamard)
//   MZI_CNOT [mode=<paper-default|strict-parity>]
//   POLARIZER <H|V>
//   TRIAPERTURE side=<mm> [orientation=<degrees>]
//   DETECT
//
// Keywords, argument names and labels are case-insensitive. Numbers are plain
// decimals with an optional sign.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "oamcnot/hybrid_state.hpp"
#include "oamcnot/interferometer.hpp"
#include "oamcnot/wavefield.hpp"

namespace oamcnot {

enum class SourcePolarization { H, V, D, A };

inline const char* to_string(SourcePolarization p) {
    switch (p) {
        case SourcePolarization::H: return "H";
        case SourcePolarization::V: return "V";
        case SourcePolarization::D: return "D";
        case SourcePolarization::A: return "A";
    }
    return "?";
}

struct Source {
    SourcePolarization pol = SourcePolarization::H;
    int ell = 1;
    friend bool operator==(const Source&, const Source&) = default;
};

struct Hwp {
    double angle_deg = 0.0;
    friend bool operator==(const Hwp&, const Hwp&) = default;
};

struct MziCnot {
    MziMode mode = MziMode::PaperDefault;
    friend bool operator==(const MziCnot&, const MziCnot&) = default;
};

struct Polarizer {
    Polarization axis = Polarization::H;
    friend bool operator==(const Polarizer&, const Polarizer&) = default;
};

/// Stored in the file's units (mm, degrees) so text round-trips exactly.
struct TriangleAperture {
    double side_mm = 2.0;
    double orientation_deg = 0.0;

    double side_m() const { return side_mm * 1e-3; }
    double orientation_rad() const { return orientation_deg * std::numbers::pi / 180.0; }
    ApertureSpec spec() const { return {ApertureShape::EquilateralTriangle, side_m(), orientation_rad()}; }

    friend bool operator==(const TriangleAperture&, const TriangleAperture&) = default;
};

struct Detect {
    friend bool operator==(const Detect&, const Detect&) = default;
};

using Statement = std::variant<Source, Hwp, MziCnot, Polarizer, TriangleAperture, Detect>;

struct Circuit {
    std::vector<Statement> statements;

    const Source& source() const { return std::get<Source>(statements.front()); }

    template <class T>
    const T* find() const {
        for (const auto& s : statements)
            if (const T* p = std::get_if<T>(&s)) return p;
        return nullptr;
    }
    template <class T>
    bool contains() const {
        return find<T>() != nullptr;
    }

    friend bool operator==(const Circuit&, const Circuit&) = default;
};

struct ParseError {
    std::size_t line = 1;
    std::size_t column = 1;
    std::string message;
    std::string token;

    std::string describe() const {
        std::string s = std::to_string(line) + ":" + std::to_string(column) + ": " + message;
        if (!token.empty()) s += " (at '" + token + "')";
        return s;
    }
};

using ParseResult = std::variant<Circuit, ParseError>;

namespace detail {

struct Token {
    std::string_view text;
    std::size_t column;  // 1-based
};

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

inline std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

inline bool iequals(std::string_view a, std::string_view b) { return upper(a) == upper(b); }

inline std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        if (i >= line.size()) break;
        const std::size_t start = i;
        while (i < line.size() && !is_space(line[i])) ++i;
        out.push_back({line.substr(start, i - start), start + 1});
    }
    return out;
}

inline bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

/// [+-]?(digits(.digits*)?|.digits)
inline std::optional<double> parse_decimal(std::string_view s) {
    if (s.empty()) return std::nullopt;
    std::string_view body = s;
    if (body.front() == '+' || body.front() == '-') body.remove_prefix(1);
    const auto dot = body.find('.');
    const std::string_view whole = body.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
    if (dot == std::string_view::npos) {
        if (!all_digits(whole)) return std::nullopt;
    } else {
        if (!(whole.empty() || all_digits(whole))) return std::nullopt;
        if (!(frac.empty() || all_digits(frac))) return std::nullopt;
        if (whole.empty() && frac.empty()) return std::nullopt;
    }
    double v = 0.0;
    const char* first = body.data();
    const char* last = body.data() + body.size();
    auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::fixed);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
    return s.front() == '-' ? -v : v;
}

inline std::optional<int> parse_integer(std::string_view s) {
    if (s.empty()) return std::nullopt;
    std::string_view body = s;
    const bool neg = body.front() == '-';
    if (body.front() == '+' || body.front() == '-') body.remove_prefix(1);
    if (!all_digits(body)) return std::nullopt;
    long long v = 0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc() || ptr != body.data() + body.size() || v > 1'000'000'000LL) return std::nullopt;
    return static_cast<int>(neg ? -v : v);
}

struct Arg {
    std::string key;  // uppercased
    std::string_view value;
    std::size_t key_column;
    std::size_t value_column;
};

struct LineParser {
    std::size_t line_no;
    std::optional<ParseError> error;

    void fail(std::size_t column, std::string message, std::string_view token) {
        if (!error) error = ParseError{line_no, column, std::move(message), std::string(token)};
    }

    /// Splits key=value tokens; rejects unknown and duplicate keys.
    std::vector<Arg> named_args(const std::vector<Token>& toks, std::initializer_list<std::string_view> allowed) {
        std::vector<Arg> args;
        for (std::size_t i = 1; i < toks.size() && !error; ++i) {
            const auto& t = toks[i];
            const auto eq = t.text.find('=');
            if (eq == std::string_view::npos || eq == 0) {
                fail(t.column, "expected key=value argument", t.text);
                break;
            }
            Arg a{upper(t.text.substr(0, eq)), t.text.substr(eq + 1), t.column, t.column + eq + 1};
            if (std::find(allowed.begin(), allowed.end(), a.key) == allowed.end()) {
                fail(t.column, "unknown argument '" + std::string(t.text.substr(0, eq)) + "'", t.text);
                break;
            }
            if (std::any_of(args.begin(), args.end(), [&](const Arg& b) { return b.key == a.key; })) {
                fail(t.column, "duplicate argument '" + std::string(t.text.substr(0, eq)) + "'", t.text);
                break;
            }
            if (a.value.empty()) {
                fail(t.column + eq, "missing value after '='", t.text.substr(eq));
                break;
            }
            args.push_back(a);
        }
        return args;
    }

    static const Arg* lookup(const std::vector<Arg>& args, std::string_view key) {
        for (const auto& a : args)
            if (a.key == key) return &a;
        return nullptr;
    }

    std::optional<Statement> parse(const std::vector<Token>& toks) {
        const Token& kw = toks.front();
        const std::string name = upper(kw.text);

        if (name == "SOURCE") {
            auto args = named_args(toks, {"POL", "OAM"});
            if (error) return std::nullopt;
            const Arg* pol = lookup(args, "POL");
            const Arg* oam = lookup(args, "OAM");
            if (!pol || !oam) {
                fail(kw.column, std::string("SOURCE requires ") + (!pol ? "pol=" : "oam="), kw.text);
                return std::nullopt;
            }
            Source s;
            const std::string p = upper(pol->value);
            if (p == "H") s.pol = SourcePolarization::H;
            else if (p == "V") s.pol = SourcePolarization::V;
            else if (p == "D") s.pol = SourcePolarization::D;
            else if (p == "A") s.pol = SourcePolarization::A;
            else {
                fail(pol->value_column, "polarization must be one of H, V, D, A", pol->value);
                return std::nullopt;
            }
            const auto ell = parse_integer(oam->value);
            if (!ell) {
                fail(oam->value_column, "malformed integer", oam->value);
                return std::nullopt;
            }
            if (std::abs(*ell) > kMaxOamMagnitude) {
                fail(oam->value_column,
                     "OAM charge outside supported range +-" + std::to_string(kMaxOamMagnitude), oam->value);
                return std::nullopt;
            }
            s.ell = *ell;
            return s;
        }
        if (name == "HWP") {
            auto args = named_args(toks, {"ANGLE"});
            if (error) return std::nullopt;
            const Arg* angle = lookup(args, "ANGLE");
            if (!angle) {
                fail(kw.column, "HWP requires angle=", kw.text);
                return std::nullopt;
            }
            const auto v = parse_decimal(angle->value);
            if (!v) {
                fail(angle->value_column, "malformed number", angle->value);
                return std::nullopt;
            }
            return Hwp{*v};
        }
        if (name == "MZI_CNOT") {
            auto args = named_args(toks, {"MODE"});
            if (error) return std::nullopt;
            MziCnot m;
            if (const Arg* mode = lookup(args, "MODE")) {
                const std::string v = upper(mode->value);
                if (v == "PAPER-DEFAULT") m.mode = MziMode::PaperDefault;
                else if (v == "STRICT-PARITY") m.mode = MziMode::StrictParity;
                else {
                    fail(mode->value_column, "mode must be paper-default or strict-parity", mode->value);
                    return std::nullopt;
                }
            }
            return m;
        }
        if (name == "POLARIZER") {
            if (toks.size() < 2) {
                fail(kw.column, "POLARIZER requires an axis (H or V)", kw.text);
                return std::nullopt;
            }
            if (toks.size() > 2) {
                fail(toks[2].column, "unexpected token", toks[2].text);
                return std::nullopt;
            }
            const std::string axis = upper(toks[1].text);
            if (axis == "H") return Polarizer{Polarization::H};
            if (axis == "V") return Polarizer{Polarization::V};
            fail(toks[1].column, "polarizer axis must be H or V", toks[1].text);
            return std::nullopt;
        }
        if (name == "TRIAPERTURE") {
            auto args = named_args(toks, {"SIDE", "ORIENTATION"});
            if (error) return std::nullopt;
            const Arg* side = lookup(args, "SIDE");
            if (!side) {
                fail(kw.column, "TRIAPERTURE requires side=", kw.text);
                return std::nullopt;
            }
            TriangleAperture t;
            const auto s = parse_decimal(side->value);
            if (!s) {
                fail(side->value_column, "malformed number", side->value);
                return std::nullopt;
            }
            if (!(*s > 0.0)) {
                fail(side->value_column, "aperture side must be positive", side->value);
                return std::nullopt;
            }
            t.side_mm = *s;
            if (const Arg* o = lookup(args, "ORIENTATION")) {
                const auto v = parse_decimal(o->value);
                if (!v) {
                    fail(o->value_column, "malformed number", o->value);
                    return std::nullopt;
                }
                t.orientation_deg = *v;
            }
            return t;
        }
        if (name == "DETECT") {
            if (toks.size() > 1) {
                fail(toks[1].column, "unexpected token", toks[1].text);
                return std::nullopt;
            }
            return Detect{};
        }
        fail(kw.column, "unknown keyword", kw.text);
        return std::nullopt;
    }
};

}  // namespace detail

/// Never throws on malformed input; every failure is a positioned ParseError.
inline ParseResult parse(std::string_view text) {
    struct Located {
        Statement stmt;
        std::size_t line;
        std::size_t column;
        std::string_view keyword;
    };
    std::vector<Located> located;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        ++line_no;
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto toks = detail::tokenize(line);
        if (toks.empty()) continue;

        detail::LineParser lp{line_no, std::nullopt};
        auto stmt = lp.parse(toks);
        if (lp.error) return *lp.error;
        located.push_back({std::move(*stmt), line_no, toks.front().column, toks.front().text});
    }

    auto fail_at = [](const Located& l, std::string message) -> ParseResult {
        return ParseError{l.line, l.column, std::move(message), std::string(l.keyword)};
    };

    if (located.empty()) return ParseError{1, 1, "circuit is missing a SOURCE statement", ""};
    if (!std::holds_alternative<Source>(located.front().stmt)) {
        return fail_at(located.front(), "the first statement must be SOURCE");
    }
    const int ell = std::get<Source>(located.front().stmt).ell;
    bool seen_detect = false;
    bool seen_aperture = false;
    for (std::size_t i = 1; i < located.size(); ++i) {
        const Located& l = located[i];
        if (seen_detect) return fail_at(l, "DETECT must be the last statement");
        if (std::holds_alternative<Source>(l.stmt)) return fail_at(l, "only one SOURCE is allowed");
        if (std::holds_alternative<MziCnot>(l.stmt) && ell == 0) {
            return fail_at(l, "MZI_CNOT needs a nonzero OAM charge; SOURCE has oam=0");
        }
        if (std::holds_alternative<TriangleAperture>(l.stmt)) {
            if (seen_aperture) return fail_at(l, "only one TRIAPERTURE is allowed");
            seen_aperture = true;
        }
        if (std::holds_alternative<Detect>(l.stmt)) seen_detect = true;
    }

    Circuit c;
    c.statements.reserve(located.size());
    for (auto& l : located) c.statements.push_back(std::move(l.stmt));
    return c;
}

/// Shortest fixed-notation text that parses back to the same double.
inline std::string format_decimal(double v) {
    char buf[512];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    if (ec != std::errc()) return "0";
    return std::string(buf, ptr);
}

inline std::string format_statement(const Statement& s) {
    struct Visitor {
        std::string operator()(const Source& x) const {
            return std::string("SOURCE pol=") + to_string(x.pol) + " oam=" + std::to_string(x.ell);
        }
        std::string operator()(const Hwp& x) const { return "HWP angle=" + format_decimal(x.angle_deg); }
        std::string operator()(const MziCnot& x) const { return std::string("MZI_CNOT mode=") + to_string(x.mode); }
        std::string operator()(const Polarizer& x) const { return std::string("POLARIZER ") + to_string(x.axis); }
        std::string operator()(const TriangleAperture& x) const {
            return "TRIAPERTURE side=" + format_decimal(x.side_mm) +
                   " orientation=" + format_decimal(x.orientation_deg);
        }
        std::string operator()(const Detect&) const { return "DETECT"; }
    };
    return std::visit(Visitor{}, s);
}

/// Canonical text: uppercase keywords, explicit defaults, one statement per line.
inline std::string format(const Circuit& c) {
    std::string out;
    for (const auto& s : c.statements) {
        out += format_statement(s);
        out += '\n';
    }
    return out;
}

}  // namespace oamcnot
