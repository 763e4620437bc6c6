// Acceptance checks. Prints one PASS/FAIL line per criterion; exits non-zero
// when any criterion fails unless it is listed with --allow-fail.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "credcal/geometry.hpp"
#include "credcal/harness.hpp"
#include "credcal/measures.hpp"
#include "credcal/optimizer.hpp"
#include "credcal/settest.hpp"
#include "credcal/synth.hpp"
#include "oracles.hpp"

using namespace credcal;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

MeasureSpec spec_of(MeasureKind kind, int bins = 10) {
    MeasureSpec s;
    s.kind = kind;
    s.bins = bins;
    return s;
}

std::string fmt(double v, const char* pattern = "%.4f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

const ErrorCurveRow& row_for(const StudyResult& r, Scenario s, const std::string& measure, double alpha) {
    for (const auto& row : r.rows) {
        if (row.scenario == s && row.measure == measure && std::abs(row.alpha - alpha) < 1e-12) return row;
    }
    throw std::runtime_error("missing study row " + measure);
}

StudySpec desk_profile(std::vector<Scenario> scenarios, std::vector<MeasureSpec> measures) {
    StudySpec spec;
    spec.scenarios = std::move(scenarios);
    spec.measures = std::move(measures);
    spec.replications = 200;
    spec.n = 100;
    spec.m = 10;
    spec.k = 10;
    spec.u = 0.01;
    spec.bootstrap_d = 100;
    spec.master_seed = 20240601;
    return spec;
}

// Criteria 1-3 share the desk-scale studies.
struct Studies {
    StudyResult null_study;
    StudyResult alt_study;
};

Studies run_studies() {
    const auto t0 = std::chrono::steady_clock::now();
    Studies s;
    s.null_study = run_study(desk_profile({Scenario::S1}, {spec_of(MeasureKind::EceConf), spec_of(MeasureKind::EceCwise),
                                                           spec_of(MeasureKind::SkceUl)}));
    s.alt_study = run_study(
        desk_profile({Scenario::S2, Scenario::S3}, {spec_of(MeasureKind::EceConf), spec_of(MeasureKind::EceCwise)}));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "# desk studies finished in " << fmt(secs) << " s\n";
    return s;
}

Outcome type_one_control(const Studies& s) {
    Outcome o{true, ""};
    for (const char* m : {"ece_conf_b10", "ece_cwise_b10"}) {
        for (double a : {0.01, 0.05, 0.1, 0.15, 0.2}) {
            const auto& row = row_for(s.null_study, Scenario::S1, m, a);
            const double bound = a + 3.0 * std::sqrt(a * (1 - a) / row.replications);
            if (row.rate > bound) o.pass = false;
            o.detail += std::string(m) + "@" + fmt(a) + "=" + fmt(row.rate) + (row.rate > bound ? "(>" + fmt(bound) + ") " : " ");
        }
    }
    return o;
}

Outcome power_ordering(const Studies& s) {
    Outcome o{true, ""};
    for (const char* m : {"ece_conf_b10", "ece_cwise_b10"}) {
        const double s2 = row_for(s.alt_study, Scenario::S2, m, 0.05).rate;
        const double s3 = row_for(s.alt_study, Scenario::S3, m, 0.05).rate;
        if (s3 < s2 - 0.05) o.pass = false;
        o.detail += std::string(m) + " S2=" + fmt(s2) + " S3=" + fmt(s3) + " ";
    }
    return o;
}

Outcome skce_ul_excess(const Studies& s) {
    const auto& row = row_for(s.null_study, Scenario::S1, "skce_ul", 0.05);
    const double bound = 0.05 + 2.0 * std::sqrt(0.05 * 0.95 / row.replications);
    return {row.rate > bound, "Type I at alpha=0.05: " + fmt(row.rate) + " (needs > " + fmt(bound) + ")"};
}

Outcome oracle_equivalence() {
    Rng rng(404);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.index(19), k = 2 + rng.index(4);
        const auto rows = oracle::random_rows(rng, n, k);
        std::vector<int> y(n);
        for (auto& v : y) v = static_cast<int>(rng.index(k));
        const auto flat = oracle::flatten(rows);
        const ProbView view{flat, n, k};
        worst = std::max(worst, std::abs(skce_uq(view, y, {2.0}) - oracle::skce_all_pairs(rows, y, 2.0)));
        worst = std::max(worst, std::abs(skce_ul(view, y, {2.0}) - oracle::skce_consecutive(rows, y, 2.0)));
    }
    return {worst <= 1e-12, "max deviation " + fmt(worst, "%.3g")};
}

Outcome hand_values() {
    const std::vector<double> two{0.7, 0.3, 0.6, 0.4};
    const std::vector<int> y{0, 1};
    const ProbView view{two, 2, 2};
    const double ece_c = ece_conf(view, y, 1);
    const double ece_w = ece_cwise(view, y, 1);
    const double hl = hl_cwise(view, y, 1);
    const std::vector<double> pair{0.6, 0.4, 0.3, 0.7};
    const double skce = skce_ul({pair, 2, 2}, y, {2.0});
    const double hl_ref = 0.15 * 0.15 / 0.65 + 0.15 * 0.15 / 0.35;
    const double skce_ref = -0.24 * std::exp(-0.15);
    const bool ok = std::abs(ece_c - 0.15) <= 1e-9 && std::abs(ece_w - 0.15) <= 1e-9 && std::abs(hl - hl_ref) <= 1e-9 &&
                    std::abs(skce - skce_ref) <= 1e-9 && std::abs(hl - 0.098901) < 5e-7 && std::abs(skce + 0.206570) < 5e-7;
    return {ok, "ECE_conf=" + std::to_string(ece_c) + " ECE_cwise=" + std::to_string(ece_w) +
                    " HL=" + std::to_string(hl) + " SKCE_ul=" + std::to_string(skce)};
}

Outcome geometry_oracle() {
    Rng rng(606);
    int agree = 0, checked = 0, skipped = 0;
    while (checked < 200) {
        const std::size_t m = 1 + rng.index(3), k = 2 + rng.index(2);
        std::vector<SimplexVector> members;
        for (std::size_t j = 0; j < m; ++j) members.push_back(SimplexVector(rng.flat_dirichlet(k)));
        const HullInstance hull(members);
        std::vector<double> q;
        if (rng.uniform() < 0.5) {
            // A grid mixture: inside by construction.
            std::vector<double> w(m, 0.0);
            int left = 200;
            for (std::size_t j = 0; j + 1 < m; ++j) {
                const int c = static_cast<int>(rng.index(static_cast<std::size_t>(left) + 1));
                w[j] = c / 200.0;
                left -= c;
            }
            w[m - 1] = left / 200.0;
            q.assign(k, 0.0);
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t s = 0; s < k; ++s) q[s] += w[j] * hull.member(j)[s];
        } else {
            q = rng.flat_dirichlet(k);
        }
        // Brute force over the weight grid at resolution 1/200.
        double best = INFINITY, diameter = 0.0;
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b)
                for (std::size_t s = 0; s < k; ++s) diameter = std::max(diameter, std::abs(hull.member(a)[s] - hull.member(b)[s]));
        std::vector<int> counts(m, 0);
        std::function<void(std::size_t, int)> walk = [&](std::size_t j, int left) {
            if (j + 1 == m) {
                counts[j] = left;
                double dist = 0.0;
                for (std::size_t s = 0; s < k; ++s) {
                    double v = 0.0;
                    for (std::size_t i = 0; i < m; ++i) v += counts[i] / 200.0 * hull.member(i)[s];
                    dist = std::max(dist, std::abs(v - q[s]));
                }
                best = std::min(best, dist);
                return;
            }
            for (int c = 0; c <= left; ++c) {
                counts[j] = c;
                walk(j + 1, left - c);
            }
        };
        walk(0, 200);
        // Grid spacing bounds how far an inside point can be from the nearest grid mixture.
        const double slack = diameter * static_cast<double>(m) / 200.0;
        bool expected;
        if (best <= 1e-12) {
            expected = true;
        } else if (best > slack + 1e-9) {
            expected = false;
        } else {
            ++skipped;
            continue;
        }
        ++checked;
        if (in_convex_hull(hull, q) == expected) ++agree;
    }
    const HullInstance seg({SimplexVector({0.2, 0.8}), SimplexVector({0.4, 0.6})});
    const auto b = find_boundary(seg, SimplexVector({0.3, 0.7}), SimplexVector({1.0, 0.0}));
    const bool ok = agree == checked && std::abs(b.lambda - 1.0 / 7.0) <= 1e-5;
    return {ok, std::to_string(agree) + "/" + std::to_string(checked) + " agree (" + std::to_string(skipped) +
                    " within grid slack skipped); lambda_b=" + std::to_string(b.lambda)};
}

Outcome optimizer_sanity() {
    const auto quad = minimize_over_simplex(
        [](std::span<const double> w) {
            return (w[0] - 0.2) * (w[0] - 0.2) + (w[1] - 0.3) * (w[1] - 0.3) + (w[2] - 0.5) * (w[2] - 0.5);
        },
        3);
    double qerr = 0.0;
    const double target[3] = {0.2, 0.3, 0.5};
    for (int i = 0; i < 3; ++i) qerr = std::max(qerr, std::abs(quad.argmin[i] - target[i]));
    const auto lin = minimize_over_simplex([](std::span<const double> w) { return 3 * w[0] + w[1] + 2 * w[2]; }, 3);
    const bool lin_ok = lin.value <= 1.0 + 1e-12 && std::abs(lin.argmin[1] - 1.0) <= 1e-4;

    Rng rng(707);
    int vertex_ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 2 + rng.index(4), n = 40, k = 3;
        std::vector<PredictionSet> members;
        for (std::size_t j = 0; j < m; ++j) members.emplace_back(n, k, oracle::flatten(oracle::random_rows(rng, n, k)));
        std::vector<int> y(n);
        for (auto& v : y) v = static_cast<int>(rng.index(k));
        const ClassifierSet set(members);
        auto objective = [&](std::span<const double> w) {
            std::vector<double> mixed(n * k);
            mix_into(set, w, mixed);
            return ece_conf({mixed, n, k}, y, 10);
        };
        OptimizerConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto r = minimize_over_simplex(objective, m, cfg);
        double vmin = INFINITY;
        for (std::size_t j = 0; j < m; ++j) vmin = std::min(vmin, objective(SimplexVector::vertex(m, j).coords()));
        if (r.value <= vmin) ++vertex_ok;
    }
    const bool ok = qerr <= 1e-3 && lin_ok && vertex_ok == 100;
    return {ok, "quadratic max error " + fmt(qerr, "%.3g") + ", linear value " + std::to_string(lin.value) +
                    ", vertex bound held " + std::to_string(vertex_ok) + "/100"};
}

Outcome degenerate_exactness() {
    int rejections = 0, runs = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(derive_seed(808, {seed}));
        const std::size_t n = 40, k = 4, m = 3;
        std::vector<double> probs(n * k, 0.0);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = static_cast<int>(rng.index(k));
            probs[i * k + static_cast<std::size_t>(labels[i])] = 1.0;
        }
        const LabeledDataset data(ClassifierSet(std::vector<PredictionSet>(m, PredictionSet(n, k, probs))), labels);
        for (auto kind : {MeasureKind::EceConf, MeasureKind::EceCwise, MeasureKind::HlCwise, MeasureKind::SkceUl,
                          MeasureKind::SkceUq}) {
            for (double a : {0.01, 0.05, 0.1, 0.15, 0.2}) {
                TestConfig cfg;
                cfg.measure = spec_of(kind, kind == MeasureKind::HlCwise ? 5 : 10);
                cfg.alpha = a;
                cfg.seed = seed;
                cfg.optimizer.random_starts = 2;
                ++runs;
                if (set_calibration_test(data, cfg).reject) ++rejections;
            }
        }
    }
    return {rejections == 0, std::to_string(rejections) + " rejections in " + std::to_string(runs) + " tests"};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CREDCAL_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism(const fs::path& dir) {
    const std::string test = std::string("test ") + CREDCAL_EXAMPLE + " --measure ece_cwise --seed 9 -o ";
    const std::string sim =
        "simulate --scenario S1 S2 --measure ece_conf skce_ul --R 6 --N 50 --M 4 --K 4 --D 30 --seed 9 --no-timing";
    bool ok = true;
    std::vector<std::string> tests, csvs, manifests;
    for (const char* w : {"1", "1", "8", "8"}) {
        const std::string tag = std::to_string(tests.size());
        const auto t = dir / ("t" + tag + ".json");
        const auto c = dir / "s.csv";
        const auto m = dir / "m.json";
        ok = ok && run_cli(std::string("--workers ") + w + " " + test + t.string()) == 0;
        ok = ok && run_cli(std::string("--workers ") + w + " " + sim + " --csv " + c.string() + " --manifest " + m.string()) == 0;
        tests.push_back(slurp(t));
        csvs.push_back(slurp(c));
        manifests.push_back(slurp(m));
    }
    for (std::size_t i = 1; i < tests.size(); ++i) {
        ok = ok && tests[i] == tests[0] && csvs[i] == csvs[0] && manifests[i] == manifests[0];
    }
    return {ok, "test/simulate outputs compared over 2 runs each at --workers 1 and 8"};
}

Outcome bundled_example(const fs::path& dir) {
    const auto out = dir / "example_report.json";
    if (run_cli(std::string("test ") + CREDCAL_EXAMPLE + " -o " + out.string()) != 0) return {false, "cmd_test failed"};
    const auto j = nlohmann::json::parse(slurp(out));
    bool ok = true;
    for (const char* key : {"null_stats", "threshold", "observed", "lambda_star", "reject", "mc_pvalue", "config"}) {
        ok = ok && j.contains(key);
    }
    std::ifstream in(CREDCAL_EXAMPLE);
    std::string header;
    std::getline(in, header);
    ok = ok && header == "K=10 M=10 N=500" && j["lambda_star"].size() == 10 && j["null_stats"].size() == 100;
    return {ok, "header '" + header + "', observed " + fmt(j.value("observed", -1.0)) + ", threshold " +
                    fmt(j.value("threshold", -1.0)) + ", reject " + (j.value("reject", false) ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> allowed;
    bool skip_studies = false;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--allow-fail" && i + 1 < argc) {
            std::stringstream list(argv[++i]);
            for (std::string item; std::getline(list, item, ',');) allowed.insert(std::stoi(item));
        } else if (arg == "--skip-studies") {
            skip_studies = true;
        }
    }

    const fs::path dir = fs::temp_directory_path() / "credcal_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    int failures = 0;
    auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::string tag = o.pass ? "PASS" : "FAIL";
        if (!o.pass && allowed.count(id)) tag = "FAIL (allowed)";
        if (!o.pass && !allowed.count(id)) ++failures;
        std::cout << tag << " criterion " << id << ": " << name << " -- " << o.detail << std::endl;
    };

    if (skip_studies) {
        std::cout << "SKIP criteria 1-3: desk studies not run\n";
    } else {
        Studies studies;
        std::string error;
        try {
            studies = run_studies();
        } catch (const std::exception& e) {
            error = e.what();
        }
        auto guarded = [&](auto fn) {
            return [&, fn]() -> Outcome {
                if (!error.empty()) return {false, "study failed: " + error};
                return fn(studies);
            };
        };
        report(1, "Type I error control (S1, ECE_conf/ECE_cwise)", guarded(type_one_control));
        report(2, "power ordering S3 vs S2 at alpha=0.05", guarded(power_ordering));
        report(3, "SKCE_ul Type I exceeds alpha at alpha=0.05", guarded(skce_ul_excess));
    }
    report(4, "SKCE oracle equivalence", oracle_equivalence);
    report(5, "hand-value fixtures", hand_values);
    report(6, "convex hull grid oracle and boundary fixture", geometry_oracle);
    report(7, "optimizer sanity", optimizer_sanity);
    report(8, "one-hot-correct ensembles never rejected", degenerate_exactness);
    report(9, "byte-identical CLI outputs across runs and workers", [&] { return determinism(dir); });
    report(10, "bundled example through cmd_test", [&] { return bundled_example(dir); });

    fs::remove_all(dir);
    return failures == 0 ? 0 : 1;
}
