// Acceptance gate: one criterion per line, PASS/FAIL with measured numbers.
// Exit status is the number of failing criteria.  Tolerances and budgets are
// pinned here, next to the checks that use them.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dice/ci_test.hpp"
#include "dice/criteria.hpp"
#include "dice/effect.hpp"
#include "dice/engine.hpp"
#include "dice/graph.hpp"
#include "dice/local_learn.hpp"
#include "dice/synth.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// --- pinned tolerances and budgets -----------------------------------------
constexpr double kSenTol = 1e-9;            // criterion 1: sensitivities
constexpr double kTableTol = 1e-9;          // criterion 1: pruned-table effects
constexpr double kExampleBudget = 1.0;      // criterion 1: seconds (spec: ms)
constexpr int kSepGraphs = 1000;            // criterion 2: graph count
constexpr double kSepBudget = 120.0;        // criterion 2: seconds
constexpr int kThm1Graphs = 500;            // criterion 3: graph count
constexpr double kThm1Budget = 120.0;       // criterion 3: seconds
constexpr int kDiscSeeds = 10;              // criterion 4
constexpr int kDiscN = 5000;
constexpr double kDiscAlpha = 0.05;
constexpr double kDiscMinF = 0.9;           // criterion 4: mean F-score floor
constexpr double kDiscBudget = 60.0;        // criterion 4: seconds
constexpr int kEstSeeds = 10;               // criterion 5
constexpr int kEstN = 20000;
constexpr double kMinBiasRelTol = 0.05;     // criterion 5: best-row error
constexpr double kMpeRelTol = 0.15;         // criterion 5: histogram estimate
constexpr double kEstBudget = 180.0;        // criterion 5: seconds
constexpr double kStratTol = 1e-12;         // criterion 6: "exact" across
                                            //   different summation orders
constexpr double kLogisticTol = 1e-6;       // criterion 6: coefficient match
constexpr int kCliDistractors = 90;         // criterion 7
constexpr int kCliN = 10000;
constexpr double kCliBudget = 60.0;         // criterion 7: query wall clock

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

bool check_budget(double elapsed, double budget, Outcome& out) {
    if (elapsed <= budget) return true;
    out.pass = false;
    out.detail += " [over budget: " + fmt(elapsed) + "s > " + fmt(budget) + "s]";
    return false;
}

// Truth for discovery on a generated benchmark: adjacency of treatment and
// outcome in the truth MAG after removing the treatment edge, as dataset
// column indices.
std::vector<int> truth_adjacency_columns(const dice::GenResult& gen) {
    const dice::MixedGraph& t = gen.truth;
    dice::NodeId w = t.node_index(gen.data.label(gen.data.treatment()));
    dice::NodeId y = t.node_index(gen.data.label(gen.data.outcome()));
    dice::MixedGraph m = t.manipulate(w, y);
    std::vector<int> cols;
    auto add = [&](dice::NodeId v) {
        if (v == w || v == y) return;
        int c = gen.data.column_index(m.label(v));
        if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
    };
    for (dice::NodeId v : m.adjacent(w)) add(v);
    for (dice::NodeId v : m.adjacent(y)) add(v);
    std::sort(cols.begin(), cols.end());
    return cols;
}

// --- criterion 1: worked-example fidelity -----------------------------------
Outcome criterion_worked_example() {
    Outcome out;
    auto t0 = Clock::now();
    dice::Ascet a = fixtures::example_ascet();

    // Expected sensitivities follow from the definition applied to the
    // reference table: Sen(X1) = (0.1 + 0 + 0.4 + 0.4)/4 = 0.225 (the prose
    // accompanying that table collapses the same four summands to 0.25, an
    // arithmetic slip), Sen(X2) = 0.1/4, Sen(X3) = 0.7/4.
    const double sen1 = dice::sensitivity(a, 1);
    const double sen2 = dice::sensitivity(a, 2);
    const double sen3 = dice::sensitivity(a, 3);
    bool sen_ok = std::abs(sen1 - 0.225) <= kSenTol && std::abs(sen2 - 0.025) <= kSenTol &&
                  std::abs(sen3 - 0.175) <= kSenTol;

    dice::Ascet p = dice::prune(a, 0.1);
    bool table_ok = p.candidates == std::vector<int>{1, 3} &&
                    p.labels == std::vector<std::string>{"X1", "X3"} &&
                    p.pruned == std::vector<int>{2} && p.rows.size() == 4;
    const double want[4] = {0.4, 0.3, 0.5, 0.1};
    for (int i = 0; table_ok && i < 4; ++i)
        table_ok = p.rows[i].mask == static_cast<std::uint32_t>(i) &&
                   std::abs(p.rows[i].effect - want[i]) <= kTableTol;

    double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    out.pass = sen_ok && table_ok;
    out.detail = "sen=(" + fmt(sen1) + "," + fmt(sen2) + "," + fmt(sen3) +
                 ") pruned_rows=" + std::to_string(p.rows.size());
    check_budget(elapsed, kExampleBudget, out);
    return out;
}

// --- criterion 2: m-separation vs per-path oracle ---------------------------
Outcome criterion_m_separation() {
    Outcome out;
    auto t0 = Clock::now();
    std::mt19937_64 rng(9001);
    const double probs[] = {0.2, 0.3, 0.4};
    long long triples = 0;
    int graphs = 0;
    for (; graphs < kSepGraphs; ++graphs) {
        const int p = 4 + graphs % 5;            // 4..8 observed nodes
        const int hidden = graphs % 4;           // 0..3 marginalized
        dice::MixedGraph g =
            oracle::random_mag(rng, p, hidden, probs[graphs % 3]);
        oracle::SeparationOracle oracle(g);
        const int n = g.node_count();
        for (int x = 0; x < n; ++x) {
            for (int y = x + 1; y < n; ++y) {
                std::vector<int> rest;
                for (int v = 0; v < n; ++v)
                    if (v != x && v != y) rest.push_back(v);
                const std::uint32_t subsets = 1u << rest.size();
                for (std::uint32_t m = 0; m < subsets; ++m) {
                    std::vector<dice::NodeId> z;
                    for (std::size_t i = 0; i < rest.size(); ++i)
                        if ((m >> i) & 1u) z.push_back(rest[i]);
                    bool fast = dice::is_m_separated(g, x, y, z);
                    bool slow = oracle.separated(x, y, z);
                    ++triples;
                    if (fast != slow) {
                        out.detail = "disagreement at graph " + std::to_string(graphs) +
                                     " x=" + std::to_string(x) + " y=" + std::to_string(y) +
                                     " |z|=" + std::to_string(z.size());
                        return out;
                    }
                }
            }
        }
    }
    double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    out.pass = graphs >= kSepGraphs;
    out.detail = std::to_string(graphs) + " graphs, " + std::to_string(triples) +
                 " triples, 100% agreement";
    check_budget(elapsed, kSepBudget, out);
    return out;
}

// --- criterion 3: Theorem-1 property suite ----------------------------------
Outcome criterion_theorem1() {
    Outcome out;
    auto t0 = Clock::now();
    std::mt19937_64 rng(9002);
    int checked = 0;
    for (int trial = 0; trial < kThm1Graphs; ++trial) {
        const int x_count = 3 + trial % 6;       // 3..8 covariates (p <= 10)
        const int hidden = trial % 3;            // 0..2 hidden confounders
        const double prob = trial % 2 ? 0.3 : 0.25;
        oracle::PretreatmentMag s =
            oracle::random_amenable_pretreatment_mag(rng, x_count, hidden, prob);

        std::vector<dice::NodeId> pa_y;
        for (dice::NodeId v : s.g.parents(s.y))
            if (v != s.w) pa_y.push_back(v);
        if (!dice::satisfies_gbc(s.g, s.w, s.y, pa_y)) {
            out.detail = "Pa(Y)\\{W} fails GBC at trial " + std::to_string(trial);
            return out;
        }

        dice::MixedGraph m = s.g.manipulate(s.w, s.y);
        std::vector<dice::NodeId> candidates;
        for (dice::NodeId v : m.adjacent(s.w))
            if (v != s.y) candidates.push_back(v);
        for (dice::NodeId v : m.adjacent(s.y))
            if (v != s.w &&
                std::find(candidates.begin(), candidates.end(), v) == candidates.end())
                candidates.push_back(v);
        auto sets = dice::enumerate_adjustment_sets(s.g, s.w, s.y, candidates,
                                                    m.node_count());
        if (sets.empty()) {
            out.detail = "no adjustment set at trial " + std::to_string(trial);
            return out;
        }
        ++checked;
    }
    double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    out.pass = checked == kThm1Graphs;
    out.detail = std::to_string(checked) + " amenable pretreatment graphs, 100% pass";
    check_budget(elapsed, kThm1Budget, out);
    return out;
}

// --- criterion 4: local discovery quality -----------------------------------
Outcome criterion_discovery() {
    Outcome out;
    auto t0 = Clock::now();
    dice::SemSpec spec = dice::bench10_spec();
    double f_sum = 0.0;
    bool oracle_perfect = true;
    for (int seed = 1; seed <= kDiscSeeds; ++seed) {
        dice::GenResult gen = dice::generate(spec, kDiscN, seed);
        std::vector<int> truth = truth_adjacency_columns(gen);

        dice::FisherZTest fisher(gen.data);
        std::vector<int> found =
            dice::find_candidates(gen.data, gen.data.treatment(), gen.data.outcome(),
                                  fisher, kDiscAlpha, 3);
        f_sum += dice::score_discovery(found, truth).f_score;

        dice::OracleCiTest oracle(gen.truth, gen.data.labels());
        std::vector<int> exact =
            dice::find_candidates(gen.data, gen.data.treatment(), gen.data.outcome(),
                                  oracle, kDiscAlpha, 3);
        if (dice::score_discovery(exact, truth).f_score != 1.0) oracle_perfect = false;
    }
    const double mean_f = f_sum / kDiscSeeds;
    double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    out.pass = mean_f >= kDiscMinF && oracle_perfect;
    out.detail = "mean_f=" + fmt(mean_f) + " (floor " + fmt(kDiscMinF) + "), oracle_f=" +
                 (oracle_perfect ? "1" : "<1");
    check_budget(elapsed, kDiscBudget, out);
    return out;
}

// --- criterion 5: end-to-end estimation -------------------------------------
Outcome criterion_end_to_end() {
    Outcome out;
    auto t0 = Clock::now();
    dice::SemSpec spec = dice::bench10_spec();
    const double truth = spec.true_effect();
    double best_err_sum = 0.0, mpe_err_sum = 0.0;
    int runs = 0;
    for (int seed = 1; seed <= kEstSeeds; ++seed) {
        dice::GenResult gen = dice::generate(spec, kEstN, seed);
        dice::DiceConfig cfg;  // defaults: alpha .05, tau .1, max_cond 3
        dice::DiceResult res = dice::run_dice(gen.data, cfg, nullptr);
        if (res.status != dice::DiceStatus::Ok) {
            out.detail = "run_dice failed at seed " + std::to_string(seed) + ": " +
                         res.message;
            return out;
        }
        double best = std::numeric_limits<double>::infinity();
        for (const dice::AscetRow& r : res.table.rows)
            if (r.valid) best = std::min(best, std::abs(r.effect - truth));
        dice::EstimateReport rep = dice::effect_histogram(
            res.table, dice::max_abs_outcome(gen.data), cfg.bin_divisor);
        best_err_sum += best / std::abs(truth);
        mpe_err_sum += std::abs(rep.estimate - truth) / std::abs(truth);
        ++runs;
    }
    const double mean_best = best_err_sum / runs;
    const double mean_mpe = mpe_err_sum / runs;
    double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    out.pass = runs == kEstSeeds && mean_best <= kMinBiasRelTol && mean_mpe <= kMpeRelTol;
    out.detail = "min_bias_rel=" + fmt(mean_best) + " (tol " + fmt(kMinBiasRelTol) +
                 "), mpe_rel=" + fmt(mean_mpe) + " (tol " + fmt(kMpeRelTol) + ")";
    check_budget(elapsed, kEstBudget, out);
    return out;
}

// --- criterion 6: estimator oracles -----------------------------------------
Outcome criterion_estimators() {
    Outcome out;
    // Stratified adjustment vs brute-force enumeration on every fixture
    // table up to 1000 rows: the hand example plus seeded random tables.
    double worst = 0.0;
    int tables = 0;
    {
        dice::Dataset hand = fixtures::make_dataset(
            {"w", "z", "y"},
            {{1, 1, 0, 0, 1, 1, 0, 0}, {0, 0, 0, 0, 1, 1, 1, 1},
             {3, 3, 1, 1, 4, 4, 2, 2}},
            "w", "y");
        double got = dice::stratified_adjustment(hand, 0, 2, {1}).value;
        double want = oracle::stratified_effect_bruteforce(hand, 0, 2, {1});
        worst = std::max(worst, std::abs(got - want));
        ++tables;
    }
    std::mt19937_64 rng(9006);
    std::uniform_int_distribution<int> zdist(0, 2), ndist(60, 1000);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 40; ++t) {
        const int n = ndist(rng);
        std::vector<double> w(n), z1(n), z2(n), y(n);
        // Seed every (z1, z2) cell with both treatment arms so no stratum
        // is degenerate, then fill the tail at random.
        int i = 0;
        for (int a = 0; a < 2 && i < n; ++a)
            for (int b = 0; b < 3 && i < n; ++b)
                for (int c = 0; c < 3 && i < n; ++c, ++i) {
                    w[i] = a;
                    z1[i] = b;
                    z2[i] = c;
                }
        for (; i < n; ++i) {
            w[i] = u(rng) < 0.5 ? 1 : 0;
            z1[i] = zdist(rng);
            z2[i] = zdist(rng);
        }
        for (int r = 0; r < n; ++r)
            y[r] = 2 * w[r] + z1[r] - z2[r] + std::floor(u(rng) * 3);
        dice::Dataset data =
            fixtures::make_dataset({"w", "z1", "z2", "y"}, {w, z1, z2, y}, "w", "y");
        for (const std::vector<int>& zs :
             {std::vector<int>{1}, std::vector<int>{2}, std::vector<int>{1, 2}}) {
            double got = dice::stratified_adjustment(data, 0, 3, zs).value;
            double want = oracle::stratified_effect_bruteforce(data, 0, 3, zs);
            worst = std::max(worst, std::abs(got - want));
            ++tables;
        }
    }
    bool strat_ok = worst <= kStratTol;

    // Logistic propensity vs the independent Newton reference on the frozen
    // 50-row dataset.
    dice::Dataset lg = fixtures::logistic50_dataset();
    dice::PropensityFit fit = dice::logistic_propensity_fit(lg, 0, {1, 2});
    Eigen::MatrixXd x(lg.rows(), 2);
    Eigen::VectorXd tvec(lg.rows());
    for (int r = 0; r < lg.rows(); ++r) {
        x(r, 0) = lg.values()(r, 1);
        x(r, 1) = lg.values()(r, 2);
        tvec(r) = lg.values()(r, 0);
    }
    Eigen::VectorXd ref = oracle::logistic_newton_reference(x, tvec);
    double coef_err = (fit.coefficients - ref).cwiseAbs().maxCoeff();
    bool logit_ok = fit.converged && coef_err <= kLogisticTol;

    out.pass = strat_ok && logit_ok;
    out.detail = std::to_string(tables) + " tables, max_strat_diff=" + fmt(worst) +
                 " (tol " + fmt(kStratTol) + "), logit_coef_err=" + fmt(coef_err) +
                 " (tol " + fmt(kLogisticTol) + ")";
    return out;
}

// --- criterion 7: scalability smoke test ------------------------------------
Outcome criterion_scalability() {
    Outcome out;
    fs::path dir = fs::temp_directory_path() / "dice_acceptance_scale";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream spec(dir / "bench10.sem", std::ios::binary);
        spec << dice::bench10_text();
    }
    auto shell = [&](const std::string& args) {
        std::string cmd = std::string(DICE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        return rc == -1 || !WIFEXITED(rc) ? -1 : WEXITSTATUS(rc);
    };
    int gen_rc = shell("generate '" + (dir / "bench10.sem").string() + "' --n " +
                       std::to_string(kCliN) + " --seed 1 --distractors " +
                       std::to_string(kCliDistractors) + " --out '" + dir.string() + "'");
    if (gen_rc != 0) {
        out.detail = "generate exited with " + std::to_string(gen_rc);
        return out;
    }
    auto t0 = Clock::now();
    int rc = shell("query '" + (dir / "data.csv").string() +
                   "' --treatment W --outcome Y --out '" + (dir / "run").string() + "'");
    double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    std::ifstream summary(dir / "run" / "summary.json");
    out.pass = rc == 0 && elapsed < kCliBudget && summary.good();
    out.detail = "p=100 n=" + std::to_string(kCliN) + " query " + fmt(elapsed) +
                 "s (budget " + fmt(kCliBudget) + "s), exit " + std::to_string(rc);
    return out;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"1 worked-example fidelity", criterion_worked_example},
        {"2 m-separation oracle equivalence", criterion_m_separation},
        {"3 theorem-1 property suite", criterion_theorem1},
        {"4 local discovery quality", criterion_discovery},
        {"5 end-to-end estimation", criterion_end_to_end},
        {"6 estimator oracles", criterion_estimators},
        {"7 scalability smoke test", criterion_scalability},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        auto t0 = Clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
        std::printf("%s  %-36s %7.2fs  %s\n", out.pass ? "PASS" : "FAIL", c.name,
                    elapsed, out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all criteria passed\n");
    return failures;
}
