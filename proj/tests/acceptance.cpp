#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "bisyz/cli.hpp"
#include "bisyz/matrixrep.hpp"
#include "bisyz/parse.hpp"

using namespace bisyz;
using json = nlohmann::json;

namespace {

Field<Rational> Q;

std::string data(const std::string& name) { return std::string(BISYZ_DATA_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Parametrization<Rational> load(const std::string& name) { return parse_parametrization(slurp(data(name))).param; }

struct Cli {
    int status;
    std::string out, err;
};

Cli cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int status = run_cli(args, out, err);
    return {status, out.str(), err.str()};
}

json cli_json(std::vector<std::string> args) {
    args.push_back("--json");
    auto r = cli(args);
    if (r.status != 0) throw std::runtime_error("exit " + std::to_string(r.status) + ": " + r.err);
    return json::parse(r.out);
}

std::string temp_file(const std::string& name, const std::string& content) {
    auto path = (std::filesystem::temp_directory_path() / ("bisyz_acceptance_" + name)).string();
    std::ofstream(path) << content;
    return path;
}

Parametrization<Rational> random_dense(Rng& rng, int d) {
    std::array<BiHomPoly<Rational>, 4> fs;
    for (auto& f : fs) {
        std::vector<Poly<Rational>::Term> terms;
        for (int i = 0; i <= d; ++i)
            for (int j = 0; j <= d; ++j) terms.emplace_back(mono::make({i, d - i, j, d - j}), Q.random(rng, 20));
        f = BiHomPoly<Rational>(Poly<Rational>::from_terms(Ring::Param, std::move(terms)), d, d);
    }
    return Parametrization<Rational>(std::move(fs), Q);
}

// Collects failed expectations for one criterion.
struct Check {
    std::vector<std::string> failures;
    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

bool run_criterion(int id, const std::string& title, double limit_s, const std::function<std::string(Check&)>& body) {
    Check c;
    std::string detail;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        detail = body(c);
    } catch (const std::exception& e) {
        c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s > limit_s) c.failures.push_back("took " + std::to_string(s) + " s, limit " + std::to_string(limit_s) + " s");
    const bool pass = c.failures.empty();
    std::cout << (pass ? "PASS" : "FAIL") << " " << id << " " << title << " (" << std::fixed << std::setprecision(2) << s
              << " s)";
    if (!detail.empty()) std::cout << ": " << detail;
    std::cout << "\n";
    for (const auto& f : c.failures) std::cout << "    " << f << "\n";
    std::cout.flush();
    return pass;
}

Matrix<Zp> reduce(const Matrix<Rational>& m, const Field<Zp>& F) {
    Matrix<Zp> out = zeros<Zp>(m.rows(), m.cols(), F);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(i, j) = F.from_rational(m(i, j));
    return out;
}

}  // namespace

int main() {
    int failed = 0;
    auto record = [&](bool ok) { failed += ok ? 0 : 1; };

    record(run_criterion(1, "worked example: strand data and 9x12 matrix", 60, [](Check& c) {
        auto info = cli_json({"info", data("basepoint.ex"), "--saturate"});
        c.expect(info["indeg_sat"] == 1, "indeg(I^sat) = " + info["indeg_sat"].dump());
        c.expect(info["nu0_optimized"] == 2 && info["nu0_validated"] == true, "optimized nu0 = " + info["nu0_optimized"].dump());
        c.expect(info["euler"] == 0, "euler = " + info["euler"].dump());
        c.expect(info["expected_degree"] == 7, "expected degree = " + info["expected_degree"].dump());
        auto m = cli_json({"matrix", data("basepoint.ex"), "--saturate"});
        c.expect(m["rows"] == 9 && m["cols"] == 12, "matrix " + m["rows"].dump() + "x" + m["cols"].dump());
        return "indeg " + info["indeg_sat"].dump() + ", nu0 " + info["nu0_optimized"].dump() + ", euler " +
               info["euler"].dump() + ", degree " + info["expected_degree"].dump() + ", " + m["rows"].dump() + "x" +
               m["cols"].dump();
    }));

    record(run_criterion(2, "worked example: implicit equation", 600, [](Check& c) {
        auto p = load("basepoint.ex");
        auto r = cli_json({"implicit", data("basepoint.ex"), "--saturate", "--strategy", "sampled:4"});
        auto D = parse_polynomial(r["D"].get<std::string>(), Ring::T);
        c.expect(D.degree() == 7, "deg D = " + std::to_string(D.degree()));
        c.expect(verify_substitution(D, p), "D does not vanish on the surface");
        c.expect(!r["F"].is_null(), "oracle produced no F");
        if (r["F"].is_null()) return std::string();
        auto F = parse_polynomial(r["F"].get<std::string>(), Ring::T);
        c.expect(F.degree() == 7, "deg F = " + std::to_string(F.degree()));
        c.expect(verify_substitution(F, p), "F does not vanish on the surface");
        auto l = lci_diagnostic(D, F);
        c.expect(l.e == 1 && r["e"] == 1, "e = " + std::to_string(l.e));
        c.expect(l.lci && l.G.is_constant() && r["lci"] == true, "G not constant");
        auto eq = temp_file("basepoint_D.txt", r["D"].get<std::string>() + "\n");
        c.expect(cli({"verify", data("basepoint.ex"), "--equation", eq}).status == 0, "verify command rejected D");
        return "deg D 7, " + std::to_string(D.size()) + " terms, verified, e " + std::to_string(l.e) + ", G constant";
    }));

    record(run_criterion(3, "Segre map", 5, [](Check& c) {
        auto I = segre_ideal(load("segre.ex"));
        auto M = build_matrix(I, 1);
        c.expect(M.rows() == 4 && M.cols() == 7, "matrix is not 4x7");
        c.expect(detail::all_subsets(M.cols(), M.rows()).size() == 35, "not 35 maximal minors");
        Rng rng(0);
        auto D = extract_gcd_of_minors(M, parse_strategy("all"), rng);
        c.expect(D == parse_polynomial("T1*T4 - T2*T3", Ring::T), "gcd of all minors is " + to_string(D));
        auto dims = strand_dims(I, 1);
        c.expect(dims == std::array<int, 4>{4, 7, 4, 1}, "strand dims differ");
        c.expect(euler_characteristic(dims) == 0, "euler != 0");
        c.expect(expected_degree(dims) == 2, "expected degree != 2");
        return "4x7, gcd of 35 minors " + to_string(D) + ", dims (4,7,4,1), euler 0, degree 2";
    }));

    record(run_criterion(4, "mixed bidegree (2,3): lift, 36x42 matrix, e = 6", 1800, [](Check& c) {
        auto lift = cli({"lift", data("mixed23.ex")});
        c.expect(lift.status == 0, "lift failed: " + lift.err);
        auto lifted = temp_file("lifted.ex", lift.out);
        auto lp = parse_parametrization(lift.out).param;
        c.expect(lp.d1() == 6 && lp.d2() == 6, "lifted bidegree is not (6,6)");
        auto m = cli_json({"matrix", lifted, "--nu", "5"});
        const std::set<int> shape{m["rows"].get<int>(), m["cols"].get<int>()};
        c.expect(shape == std::set<int>{36, 42}, "matrix " + m["rows"].dump() + "x" + m["cols"].dump());
        auto r = cli_json({"implicit", lifted, "--nu", "5"});
        c.expect(!r["F"].is_null(), "oracle produced no F");
        c.expect(r["e"] == 6, "e = " + r["e"].dump());
        c.expect(r["lci"] == true, "G not constant");
        return "(6,6) after lift, " + m["rows"].dump() + "x" + m["cols"].dump() + ", deg D " + r["degree"].dump() +
               ", deg F " + std::to_string(parse_polynomial(r["F"].get<std::string>(), Ring::T).degree()) + ", e " +
               r["e"].dump();
    }));

    record(run_criterion(5, "generic dense bidegree (2,2)", 600, [](Check& c) {
        Rng rng(2024);
        std::string degs;
        for (int trial = 0; trial < 5; ++trial) {
            auto I = segre_ideal(random_dense(rng, 2));
            auto r = strand_report(I, 3, true);
            c.expect(r.expected_deg_D == 8, "trial " + std::to_string(trial) + ": degree " + std::to_string(r.expected_deg_D));
            c.expect(r.euler == 0, "trial " + std::to_string(trial) + ": euler " + std::to_string(r.euler));
            c.expect(r.indeg_sat && *r.indeg_sat == 0, "trial " + std::to_string(trial) + ": indeg(I^sat) != 0");
            degs += (degs.empty() ? "" : ",") + std::to_string(r.expected_deg_D);
        }
        return "degrees " + degs + ", euler 0, indeg 0";
    }));

    record(run_criterion(6, "membership by rank drop", 600, [](Check& c) {
        std::string detail;
        for (auto [name, nu] : {std::pair{"basepoint.ex", 2}, std::pair{"segre.ex", 1}}) {
            auto p = load(name);
            auto M = build_matrix(segre_ideal(p), nu);
            Rng rng(6);
            auto F = interpolation_oracle(p, 7, rng);
            int on_ok = 0, off_ok = 0, on_n = 0, off_n = 0;
            while (on_n < 100) {
                auto q = p.eval(detail::random_parameter(Q, rng));
                if (std::all_of(q.begin(), q.end(), [](const Rational& x) { return x == 0; })) continue;
                ++on_n;
                on_ok += membership(M, q).on_surface ? 1 : 0;
            }
            while (off_n < 100) {
                auto R = detail::random_parameter(Q, rng);
                if (F.eval(R, Q.zero()) == 0) continue;
                ++off_n;
                off_ok += membership(M, R).on_surface ? 0 : 1;
            }
            c.expect(on_ok == 100, std::string(name) + ": " + std::to_string(100 - on_ok) + " on-surface points without rank drop");
            c.expect(off_ok == 100, std::string(name) + ": " + std::to_string(100 - off_ok) + " off-surface points with rank drop");
            detail += (detail.empty() ? "" : "; ") + std::string(name) + " " + std::to_string(on_ok) + "/100 on, " +
                      std::to_string(off_ok) + "/100 off";
        }
        return detail;
    }));

    record(run_criterion(7, "invariant suites", 600, [](Check& c) {
        for (int n = 0; n <= 12; ++n)
            c.expect(basis(n).size() == static_cast<std::size_t>((n + 1) * (n + 1)), "dim A_" + std::to_string(n));

        Rng rng(7);
        int roundtrip_bad = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            const int n = static_cast<int>(rng() % 5);
            std::vector<Poly<Rational>::Term> terms, xs;
            const auto& b = basis(n);
            for (int k = 0; k < 5; ++k) {
                int i = static_cast<int>(rng() % (n + 1)), j = static_cast<int>(rng() % (n + 1));
                terms.emplace_back(mono::make({i, n - i, j, n - j}), Q.random(rng, 50));
                xs.emplace_back(b.monomials[rng() % b.size()], Q.random(rng, 50));
            }
            BiHomPoly<Rational> f(Poly<Rational>::from_terms(Ring::Param, std::move(terms)), n, n);
            SegreElem<Rational> x(Poly<Rational>::from_terms(Ring::Segre, std::move(xs)), n);
            if (!(theta(omega(f)) == f) || !(omega(theta(x)) == x)) ++roundtrip_bad;
        }
        c.expect(roundtrip_bad == 0, std::to_string(roundtrip_bad) + " round trips failed");

        Rng gen(2024);
        std::vector<std::pair<std::string, Parametrization<Rational>>> examples{
            {"basepoint", load("basepoint.ex")}, {"segre", load("segre.ex")}, {"generic", random_dense(gen, 2)}};
        int dd_bad = 0, rank_bad = 0, matrices = 0;
        for (const auto& [name, p] : examples) {
            auto I = segre_ideal(p);
            auto n0 = analyze_nu0(I, false).value;
            auto a = strand_report(I, n0, false), b = strand_report(I, n0 + 1, false);
            c.expect(a.expected_deg_D == b.expected_deg_D,
                     name + ": expected degree " + std::to_string(a.expected_deg_D) + " at nu0, " +
                         std::to_string(b.expected_deg_D) + " at nu0+1");

            std::vector<Matrix<Rational>> assembled;
            for (int nu = 0; nu <= n0 + 1; ++nu) {
                for (int i = 1; i <= 4; ++i) assembled.push_back(koszul_matrix(I, i, nu));
                for (int i = 2; i <= 4; ++i)
                    if (!(koszul_matrix(I, i - 1, nu + I.d) * koszul_matrix(I, i, nu)).isZero(0)) ++dd_bad;
                auto M = build_matrix(I, nu);
                if (M.cols() > 0) assembled.push_back(M.at(detail::random_parameter(Q, rng)));
            }
            for (const auto& m : assembled) {
                ++matrices;
                const int r = rank(m);
                for (int k = 0; k < 3; ++k) {
                    Field<Zp> F(random_prime(rng));
                    if (rank(reduce(m, F)) != r) ++rank_bad;
                }
            }
        }
        c.expect(dd_bad == 0, std::to_string(dd_bad) + " Koszul compositions nonzero");
        c.expect(rank_bad == 0, std::to_string(rank_bad) + " modular ranks disagree");
        return "dim A_n for n<=12, 1000 round trips, d o d = 0, stable degree on 3 examples, " +
               std::to_string(matrices) + " matrices x 3 primes";
    }));

    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
    return failed == 0 ? 0 : 1;
}
