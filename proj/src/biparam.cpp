#include "bisyz/biparam.hpp"

#include <cctype>
#include <sstream>

#include "bisyz/parse.hpp"

namespace bisyz {
namespace {

std::string_view strip(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string> words(std::string_view s) {
    std::istringstream in{std::string(s)};
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

int to_nonneg(const std::string& w, int line, int column) {
    if (w.empty() || w.size() > 4 || !std::all_of(w.begin(), w.end(), [](char c) { return std::isdigit(c); }))
        throw ParseError(line, column, "expected a non-negative integer, got '" + w + "'");
    return std::stoi(w);
}

bool mentions_uv(const Poly<Rational>& p) { return p.degree_in(1) > 0 || p.degree_in(3) > 0; }

}  // namespace

ParsedInput parse_parametrization(std::string_view text) {
    std::optional<std::pair<int, int>> degree;
    std::optional<std::uint64_t> prime;
    std::array<std::optional<Poly<Rational>>, 4> polys;
    std::array<int, 4> poly_line{};

    int lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++lineno;
        start = end + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (strip(line).empty()) {
            if (end == text.size()) break;
            continue;
        }
        auto colon = line.find(':');
        if (colon == std::string_view::npos) throw ParseError(lineno, 1, "expected '<key>: <value>'");
        std::string key(strip(line.substr(0, colon)));
        std::string_view value = line.substr(colon + 1);
        const int vcol = static_cast<int>(colon) + 2;

        if (key == "degree") {
            auto w = words(value);
            if (w.size() != 2) throw ParseError(lineno, vcol, "expected 'degree: <d1> <d2>'");
            degree = {to_nonneg(w[0], lineno, vcol), to_nonneg(w[1], lineno, vcol)};
        } else if (key == "field") {
            auto w = words(value);
            if (w.size() == 1 && w[0] == "QQ") {
                prime.reset();
            } else if (w.size() == 2 && w[0] == "GF") {
                std::uint64_t p = 0;
                try {
                    p = std::stoull(w[1]);
                } catch (const std::exception&) {
                    throw ParseError(lineno, vcol, "bad modulus '" + w[1] + "'");
                }
                if (p >= (std::uint64_t{1} << 62) || !is_prime(p))
                    throw ParseError(lineno, vcol, "modulus must be a prime below 2^62");
                prime = p;
            } else {
                throw ParseError(lineno, vcol, "expected 'field: QQ' or 'field: GF <p>'");
            }
        } else if (key.size() == 2 && key[0] == 'f' && key[1] >= '1' && key[1] <= '4') {
            int i = key[1] - '1';
            if (polys[i]) throw ParseError(lineno, 1, "duplicate " + key);
            polys[i] = parse_polynomial(value, Ring::Param, lineno, static_cast<int>(colon) + 2);
            poly_line[i] = lineno;
        } else {
            throw ParseError(lineno, 1, "unknown key '" + key + "'");
        }
        if (end == text.size()) break;
    }

    if (!degree) throw ParseError(lineno, 1, "missing 'degree:' line");
    for (int i = 0; i < 4; ++i)
        if (!polys[i]) throw ParseError(lineno, 1, "missing f" + std::to_string(i + 1));

    const auto [d1, d2] = *degree;
    const bool affine = std::none_of(polys.begin(), polys.end(), [](const auto& p) { return mentions_uv(*p); });
    std::array<BiHomPoly<Rational>, 4> fs;
    for (int i = 0; i < 4; ++i) {
        Poly<Rational> p = *polys[i];
        for (const auto& [k, c] : p.terms()) {
            Exponents e = mono::unpack(k);
            bool ok = affine ? e[0] <= d1 && e[2] <= d2 : e[0] + e[1] == d1 && e[2] + e[3] == d2;
            if (!ok)
                throw ParseError(poly_line[i], 1,
                                 "bidegree mismatch: term " + mono::to_string(k, Ring::Param) + " of f" +
                                     std::to_string(i + 1) + " does not fit degree " + std::to_string(d1) + " " +
                                     std::to_string(d2));
        }
        if (affine)
            p = p.map_monomials(Ring::Param, [&](std::uint64_t k) {
                Exponents e = mono::unpack(k);
                return mono::make({e[0], d1 - e[0], e[2], d2 - e[2]});
            });
        fs[i] = BiHomPoly<Rational>(std::move(p), d1, d2);
    }
    if (std::all_of(fs.begin(), fs.end(), [](const auto& f) { return f.is_zero(); }))
        throw ParseError(lineno, 1, "all four polynomials are zero");
    return ParsedInput{Parametrization<Rational>(std::move(fs), Field<Rational>{}), prime};
}

}  // namespace bisyz
