#include "bisyz/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "bisyz/matrixrep.hpp"
#include "bisyz/parse.hpp"

namespace bisyz {
namespace {

using json = nlohmann::json;

constexpr int kOk = 0, kError = 1, kViolation = 2;

struct RunConfig {
    std::string command;
    std::string input;
    int nu = -1;
    bool saturate = false;
    std::uint64_t modulus = 0;
    std::string strategy = "sampled";
    std::string point;
    std::uint64_t seed = 0;
    bool json = false;
    std::string equation;
};

struct Session {
    const RunConfig& cfg;
    std::ostream& out;
    std::ostream& err;
    std::vector<std::string> warnings;

    void warn(const std::string& msg) {
        err << "warning: " << msg << "\n";
        warnings.push_back(msg);
    }
    void note(const std::string& msg) const { err << "note: " << msg << "\n"; }
    int status() const { return warnings.empty() ? kOk : kViolation; }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string bidegree(int d1, int d2) { return "(" + std::to_string(d1) + "," + std::to_string(d2) + ")"; }

std::array<Rational, 4> parse_point(const std::string& text) {
    std::array<Rational, 4> out;
    std::stringstream ss(text);
    std::string item;
    int n = 0;
    while (std::getline(ss, item, ',')) {
        if (n == 4) throw std::invalid_argument("--point takes exactly four coordinates");
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        const std::string digits = item.substr(!item.empty() && (item[0] == '-' || item[0] == '+'));
        const auto slash = digits.find('/');
        auto ok = [](const std::string& s) {
            return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
        };
        if (!(slash == std::string::npos ? ok(digits) : ok(digits.substr(0, slash)) && ok(digits.substr(slash + 1))))
            throw std::invalid_argument("bad coordinate '" + item + "' in --point");
        Rational q(item[0] == '+' ? item.substr(1) : item);
        if (q.get_den() == 0) throw std::invalid_argument("zero denominator in --point");
        q.canonicalize();
        out[n++] = q;
    }
    if (n != 4) throw std::invalid_argument("--point takes exactly four coordinates");
    return out;
}

// First line that is neither blank nor a comment.
Poly<Rational> read_equation(const std::string& path) {
    std::stringstream ss(slurp(path));
    std::string line;
    for (int no = 1; std::getline(ss, line); ++no) {
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        return parse_polynomial(line, Ring::T, no, 1);
    }
    throw std::runtime_error(path + " contains no equation");
}

template <class S>
class Runner {
public:
    Runner(Session& s, const Parametrization<S>& original) : s_(s), original_(original), param_(original) {}

    int run() {
        const auto& cmd = s_.cfg.command;
        if (cmd == "lift") return lift();
        if (cmd == "verify") return verify();
        if (param_.d1() != param_.d2()) {
            lift_e_ = lift_exponent(param_.d1(), param_.d2());
            param_ = lift_mixed(original_);
            s_.note("bidegree " + bidegree(original_.d1(), original_.d2()) + " lifted to " +
                    bidegree(param_.d1(), param_.d2()) + "; the determinant gains the exponent " +
                    std::to_string(lift_e_));
        }
        auto g = gcd_of_inputs(original_);
        if (!g.is_constant())
            s_.warn("base locus not finite: the inputs share the factor " + to_string(g) +
                    "; results are not guaranteed");
        ideal_ = segre_ideal(param_);
        n0_ = analyze_nu0(*ideal_, s_.cfg.saturate);
        if (s_.cfg.saturate && n0_.optimized && !n0_.validated)
            s_.note("optimized nu0=" + std::to_string(*n0_.optimized) + " failed validation; using nu0=" +
                    std::to_string(n0_.conservative));
        nu_ = s_.cfg.nu >= 0 ? s_.cfg.nu : n0_.value;
        if (nu_ < n0_.value)
            s_.note("nu=" + std::to_string(nu_) + " is below nu0=" + std::to_string(n0_.value) +
                    "; results are not guaranteed");
        if (cmd == "info") return info();
        if (cmd == "matrix") return matrix();
        if (cmd == "membership") return membership_cmd();
        return implicit();
    }

private:
    std::string nu0_summary(const StrandReport& r) const {
        std::string line = "expected degree " + std::to_string(r.expected_deg_D) +
                           ", nu0=" + std::to_string(r.nu0_conservative);
        if (r.nu0_optimized && *r.nu0_optimized != r.nu0_conservative) {
            line += ", optimized nu0=" + std::to_string(*r.nu0_optimized);
            if (!r.nu0_validated) line += " (rejected)";
        }
        return line;
    }

    StrandReport report() {
        auto r = strand_report(*ideal_, nu_, n0_);
        if (r.euler != 0)
            s_.warn("Euler characteristic " + std::to_string(r.euler) + " at nu=" + std::to_string(nu_) +
                    " is nonzero; the expected degree is meaningless here");
        return r;
    }

    int info() {
        auto r = report();
        if (s_.cfg.json) {
            json j = {{"bidegree", {param_.d1(), param_.d2()}},
                      {"field", param_.field.name()},
                      {"d", r.d},
                      {"nu", r.nu},
                      {"dims", r.dims},
                      {"euler", r.euler},
                      {"expected_degree", r.expected_deg_D},
                      {"nu0", r.nu0_conservative},
                      {"nu0_validated", r.nu0_validated},
                      {"sum_dp", r.sum_dp},
                      {"lift_exponent", lift_e_},
                      {"warnings", s_.warnings}};
            j["nu0_optimized"] = r.nu0_optimized ? json(*r.nu0_optimized) : json(nullptr);
            j["indeg_sat"] = r.indeg_sat ? json(*r.indeg_sat) : json(nullptr);
            s_.out << j.dump(2) << "\n";
        } else {
            s_.out << "bidegree " << bidegree(param_.d1(), param_.d2()) << " over " << param_.field.name() << "\n";
            s_.out << "nu=" << r.nu << ": dim A=" << r.dims[0] << ", Z1=" << r.dims[1] << ", Z2=" << r.dims[2]
                   << ", Z3=" << r.dims[3] << "\n";
            s_.out << "euler characteristic " << r.euler << "\n";
            s_.out << nu0_summary(r) << "\n";
            if (r.indeg_sat) s_.out << "indeg(I^sat)=" << *r.indeg_sat << "\n";
            s_.out << "sum of d_p over base points " << r.sum_dp << "\n";
        }
        return s_.status();
    }

    int matrix() {
        auto M = build_matrix(*ideal_, nu_);
        if (s_.cfg.json) {
            json rows = json::array(), basis = json::array();
            for (auto key : M.row_basis) basis.push_back(mono::to_string(key, Ring::Segre));
            for (int r = 0; r < M.rows(); ++r) {
                json row = json::array();
                for (int c = 0; c < M.cols(); ++c) {
                    json e = json::array();
                    for (const auto& x : M.entry(r, c)) e.push_back(to_string(x));
                    row.push_back(e);
                }
                rows.push_back(row);
            }
            s_.out << json{{"nu", M.nu}, {"rows", M.rows()}, {"cols", M.cols()}, {"row_basis", basis}, {"entries", rows}}
                          .dump()
                   << "\n";
        } else {
            s_.out << "# " << M.rows() << " x " << M.cols() << " matrix at nu=" << M.nu << "\n";
            for (int r = 0; r < M.rows(); ++r) {
                s_.out << mono::to_string(M.row_basis[r], Ring::Segre);
                for (int c = 0; c < M.cols(); ++c) s_.out << "\t" << to_string(to_poly(M.entry(r, c)));
                s_.out << "\n";
            }
        }
        return s_.status();
    }

    int membership_cmd() {
        if (s_.cfg.point.empty()) throw std::invalid_argument("membership needs --point a,b,c,d");
        auto q = parse_point(s_.cfg.point);
        std::array<S, 4> point;
        for (int i = 0; i < 4; ++i) point[i] = param_.field.from_rational(q[i]);
        auto res = membership(build_matrix(*ideal_, nu_), point);
        if (s_.cfg.json) {
            json coords = json::array();
            for (const auto& x : point) coords.push_back(to_string(x));
            s_.out << json{{"point", coords}, {"rank", res.rank}, {"k", res.k}, {"on_surface", res.on_surface}}.dump()
                   << "\n";
        } else if (res.on_surface) {
            s_.out << "ON (rank " << res.rank << " < k = " << res.k << ")\n";
        } else {
            s_.out << "OFF (rank " << res.rank << " = k)\n";
        }
        return s_.status();
    }

    int implicit() {
        const Strategy st = parse_strategy(s_.cfg.strategy);
        Rng rng(s_.cfg.seed);
        auto r = report();
        auto M = build_matrix(*ideal_, nu_);
        EquationReport<S> eq;
        eq.D = extract_gcd_of_minors(M, st, rng);
        if (!verify_substitution(eq.D, original_))
            throw std::runtime_error("the gcd of maximal minors does not vanish on the surface");
        if (eq.D.degree() != r.expected_deg_D)
            s_.warn("deg D = " + std::to_string(eq.D.degree()) + " differs from the expected degree " +
                    std::to_string(r.expected_deg_D));
        try {
            eq.F = interpolation_oracle(original_, eq.D.degree(), rng);
        } catch (const std::runtime_error& e) {
            s_.warn(std::string("oracle: ") + e.what());
        }
        if (eq.F) {
            auto l = lci_diagnostic(eq.D, *eq.F);
            eq.e = l.e;
            eq.G = l.G;
            eq.lci = l.lci;
        }

        if (s_.cfg.json) {
            json j = {{"D", to_string(eq.D)},
                      {"degree", eq.D.degree()},
                      {"expected_degree", r.expected_deg_D},
                      {"nu", nu_},
                      {"rows", M.rows()},
                      {"cols", M.cols()},
                      {"verified", true},
                      {"lift_exponent", lift_e_},
                      {"warnings", s_.warnings}};
            j["F"] = eq.F ? json(to_string(*eq.F)) : json(nullptr);
            j["e"] = eq.e ? json(*eq.e) : json(nullptr);
            j["G"] = eq.G ? json(to_string(*eq.G)) : json(nullptr);
            j["lci"] = eq.lci ? json(*eq.lci) : json(nullptr);
            s_.out << j.dump(2) << "\n";
            return s_.status();
        }
        s_.out << to_string(eq.D) << "\n";
        s_.out << "# nu=" << nu_ << ", " << M.rows() << " x " << M.cols() << " matrix, strategy " << s_.cfg.strategy
               << ", seed " << s_.cfg.seed << "\n";
        s_.out << "# degree " << eq.D.degree() << " (expected " << r.expected_deg_D << ")\n";
        s_.out << "# substitution check: pass\n";
        if (eq.F) {
            s_.out << "# oracle F: degree " << eq.F->degree() << "\n";
            s_.out << "# D = c * F^" << *eq.e << " * G with deg G = " << eq.G->degree()
                   << (*eq.lci ? ", G constant: locally complete intersection" : ", G not constant") << "\n";
            if (lift_e_ > 1)
                s_.out << "# e includes the lift exponent " << lift_e_ << "; deg(psi) of the input is "
                       << *eq.e / lift_e_ << "\n";
        }
        return s_.status();
    }

    int verify() {
        if (s_.cfg.equation.empty()) throw std::invalid_argument("verify needs --equation FILE");
        auto F = read_equation(s_.cfg.equation).map_coeffs([&](const Rational& q) { return original_.field.from_rational(q); });
        const bool ok = verify_substitution(F, original_);
        if (s_.cfg.json)
            s_.out << json{{"equation", to_string(F)}, {"valid", ok}}.dump() << "\n";
        else
            s_.out << (ok ? "VALID" : "INVALID") << ": F(f1,f2,f3,f4) " << (ok ? "=" : "!=") << " 0\n";
        return ok ? kOk : kViolation;
    }

    int lift() {
        auto lifted = lift_mixed(original_);
        const int e = lift_exponent(original_.d1(), original_.d2());
        if (s_.cfg.json) {
            json fs = json::array();
            for (const auto& f : lifted.f) fs.push_back(to_string(f));
            s_.out << json{{"from", {original_.d1(), original_.d2()}},
                           {"bidegree", {lifted.d1(), lifted.d2()}},
                           {"exponent", e},
                           {"field", lifted.field.name()},
                           {"f", fs}}
                          .dump(2)
                   << "\n";
        } else {
            s_.out << "# lifted from bidegree " << bidegree(original_.d1(), original_.d2())
                   << "; determinant exponent " << e << "\n"
                   << print_parametrization(lifted);
        }
        return kOk;
    }

    Session& s_;
    Parametrization<S> original_;
    Parametrization<S> param_;
    std::optional<SegreIdeal<S>> ideal_;
    Nu0Info n0_;
    int nu_ = 0;
    int lift_e_ = 1;
};

int execute(Session& s) {
    auto in = parse_parametrization(slurp(s.cfg.input));
    std::optional<std::uint64_t> prime = in.prime;
    if (s.cfg.modulus) {
        if (s.cfg.modulus >= (std::uint64_t{1} << 62) || !is_prime(s.cfg.modulus))
            throw std::invalid_argument("--mod must be a prime below 2^62");
        if (prime && *prime != s.cfg.modulus)
            throw std::invalid_argument("--mod " + std::to_string(s.cfg.modulus) + " conflicts with the field GF " +
                                        std::to_string(*prime) + " declared in the input");
        prime = s.cfg.modulus;
    }
    if (prime) return Runner<Zp>(s, to_field(in.param, Field<Zp>(*prime))).run();
    return Runner<Rational>(s, in.param).run();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Implicit equations of bi-degree (d,d) surfaces from linear syzygies", "bisyz"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("input", cfg.input, "parametrization file")->required();
        sub->add_option("--mod", cfg.modulus, "work over GF(p)");
        sub->add_flag("--json", cfg.json, "machine-readable output");
        return sub;
    };
    auto strand = [&](CLI::App* sub) {
        common(sub);
        sub->add_option("--nu", cfg.nu, "strand degree (default nu0)")->check(CLI::NonNegativeNumber);
        sub->add_flag("--saturate", cfg.saturate, "lower nu0 by the initial degree of the saturation");
        sub->add_option("--seed", cfg.seed, "seed for all random choices");
        return sub;
    };
    strand(app.add_subcommand("info", "strand dimensions, Euler characteristic, expected degree"));
    strand(app.add_subcommand("matrix", "the representation matrix"));
    strand(app.add_subcommand("membership", "rank test at a point"))
        ->add_option("--point", cfg.point, "a,b,c,d")
        ->required();
    strand(app.add_subcommand("implicit", "gcd of maximal minors with checks"))
        ->add_option("--strategy", cfg.strategy, "all | sampled:N");
    common(app.add_subcommand("verify", "substitute an equation into the parametrization"))
        ->add_option("--equation", cfg.equation, "file whose first line is the equation")
        ->required();
    common(app.add_subcommand("lift", "lift a mixed bidegree to (L,L)"));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kError;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    Session s{cfg, out, err, {}};
    try {
        return execute(s);
    } catch (const RankDeficient& e) {
        err << "hypothesis violated: " << e.what() << "\n";
        return kViolation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kError;
    }
}

}  // namespace bisyz
