// Command-line front end: causal-query execution over CSV data, synthetic
// benchmark generation, and discovery benchmarking.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <optional>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dice/criteria.hpp"
#include "dice/engine.hpp"
#include "dice/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

// FNV-1a 64-bit digest of the raw input bytes, for reproducibility records.
std::string digest_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

struct QueryArgs {
    std::string input;
    std::string treatment, outcome;
    double alpha = 0.05;
    double tau = 0.1;
    std::string estimand = "ate";
    int max_cond = 3;
    int max_candidates = 16;
    int bin_divisor = 100;
    std::string graph_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
};

int run_query(const QueryArgs& a) {
    auto t0 = std::chrono::steady_clock::now();
    const std::string input_bytes = read_file(a.input);
    std::istringstream input_stream(input_bytes);
    dice::Dataset data = dice::Dataset::from_csv(input_stream, a.treatment, a.outcome);

    std::optional<dice::MixedGraph> truth;
    if (!a.graph_path.empty())
        truth = dice::MixedGraph::from_text(read_file(a.graph_path));

    dice::DiceConfig cfg;
    cfg.alpha = a.alpha;
    cfg.tau = a.tau;
    cfg.max_cond = a.max_cond;
    cfg.max_candidates = a.max_candidates;
    cfg.bin_divisor = a.bin_divisor;
    cfg.estimand = a.estimand == "att" ? dice::Estimand::Att : dice::Estimand::Ate;

    dice::DiceResult res = dice::run_dice(data, cfg, truth ? &*truth : nullptr);

    json summary;
    summary["status"] =
        res.status == dice::DiceStatus::Ok ? "ok" : "adjustment set could not be found";
    if (!res.message.empty()) summary["message"] = res.message;
    summary["input"] = {{"path", a.input},
                        {"digest", digest_hex(input_bytes)},
                        {"rows", data.rows()},
                        {"columns", data.cols()}};
    summary["config"] = {{"treatment", a.treatment},
                         {"outcome", a.outcome},
                         {"alpha", cfg.alpha},
                         {"tau", cfg.tau},
                         {"max_cond", cfg.max_cond},
                         {"max_candidates", cfg.max_candidates},
                         {"bin_divisor", cfg.bin_divisor},
                         {"estimand", a.estimand},
                         {"graph", a.graph_path},
                         {"seed", a.seed}};

    json cand = json::array();
    for (std::size_t i = 0; i < res.full.labels.size(); ++i)
        cand.push_back({{"column", res.full.labels[i]},
                        {"sensitivity", finite_or_null(res.sensitivities[i])}});
    summary["candidates"] = cand;
    json pruned = json::array();
    for (int c : res.table.pruned) pruned.push_back(data.label(c));
    summary["pruned"] = pruned;
    summary["failed_rows"] = res.failed_rows;
    summary["rows_before_pruning"] = res.full.rows.size();
    summary["rows_after_pruning"] = res.table.rows.size();
    if (truth) {
        int pass = 0, fail = 0, unknown = 0;
        for (const dice::AscetRow& r : res.table.rows) {
            if (r.gbc == 1)
                ++pass;
            else if (r.gbc == 0)
                ++fail;
            else
                ++unknown;
        }
        summary["oracle"] = {{"gbc_pass", pass},
                             {"gbc_fail", fail},
                             {"gbc_unknown", unknown}};
    }

    std::string histogram_csv = "lo,hi,count,mean\n";
    bool any_valid = false;
    for (const dice::AscetRow& r : res.table.rows) any_valid = any_valid || r.valid;
    if (res.status == dice::DiceStatus::Ok && any_valid) {
        const double max_y = dice::max_abs_outcome(data);
        dice::EstimateReport rep =
            dice::effect_histogram(res.table, max_y, cfg.bin_divisor);
        summary["estimate"] = rep.estimate;
        summary["histogram"] = {{"bin_width", rep.width},
                                {"median", rep.median},
                                {"chosen_bin", rep.chosen}};
        for (const dice::HistogramBin& b : rep.bins) {
            if (b.count == 0) continue;
            histogram_csv += dice::format_double(b.lo) + ',' + dice::format_double(b.hi) +
                             ',' + std::to_string(b.count) + ',' +
                             dice::format_double(b.mean) + '\n';
        }
    } else {
        summary["estimate"] = nullptr;
    }
    summary["timings"] = {{"discovery_seconds", res.discovery_seconds},
                          {"estimation_seconds", res.estimation_seconds},
                          {"total_seconds", seconds_since(t0)}};

    fs::create_directories(a.out_dir);
    write_file(fs::path(a.out_dir) / "ascet.csv", dice::ascet_to_csv(res.table));
    write_file(fs::path(a.out_dir) / "histogram.csv", histogram_csv);
    write_file(fs::path(a.out_dir) / "summary.json", summary.dump(2) + "\n");

    if (res.status != dice::DiceStatus::Ok) {
        std::cerr << res.message << "\n";
        return 2;
    }
    std::cout << "estimate: " << summary["estimate"].dump() << " ("
              << res.table.rows.size() << " rows, " << res.table.candidates.size()
              << " candidates after pruning)\n";
    return 0;
}

struct GenerateArgs {
    std::string spec_path;
    int n = 1000;
    std::uint64_t seed = 0;
    int distractors = -1;  // -1: use the spec's value
    std::string out_dir = ".";
};

int run_generate(const GenerateArgs& a) {
    dice::SemSpec spec = dice::SemSpec::from_file(a.spec_path);
    dice::GenResult gen = dice::generate(spec, a.n, a.seed);
    const int distractors = a.distractors >= 0 ? a.distractors : spec.distractors;
    dice::Dataset data = distractors > 0
                             ? dice::add_distractors(gen.data, distractors,
                                                     a.seed ^ 0x9e3779b97f4a7c15ULL)
                             : std::move(gen.data);

    fs::create_directories(a.out_dir);
    std::ostringstream csv;
    data.to_csv(csv);
    write_file(fs::path(a.out_dir) / "data.csv", csv.str());
    write_file(fs::path(a.out_dir) / "truth.graph", gen.truth.to_text());
    json meta = {{"spec", a.spec_path},
                 {"n", a.n},
                 {"seed", a.seed},
                 {"distractors", distractors},
                 {"treatment", spec.treatment},
                 {"outcome", spec.outcome},
                 {"true_effect", gen.true_effect},
                 {"data_digest", digest_hex(csv.str())}};
    write_file(fs::path(a.out_dir) / "meta.json", meta.dump(2) + "\n");
    std::cout << "wrote " << data.rows() << "x" << data.cols() << " dataset to "
              << a.out_dir << "\n";
    return 0;
}

struct BenchArgs {
    std::string spec_path;
    int reps = 10;
    std::vector<int> n_grid{5000};
    std::vector<int> distractor_grid{0};
    double alpha = 0.05;
    int max_cond = 3;
    std::uint64_t seed = 1;
    std::string out_file;  // empty: stdout
};

int run_bench(const BenchArgs& a) {
    if (a.reps < 1) throw std::runtime_error("bench: --reps must be at least 1");
    dice::SemSpec spec = dice::SemSpec::from_file(a.spec_path);

    std::ostringstream report;
    report << "n,distractors,reps,precision,recall,f_score,generate_seconds,"
              "discovery_seconds\n";
    for (int n : a.n_grid) {
        for (int d : a.distractor_grid) {
            double precision = 0.0, recall = 0.0, f_score = 0.0;
            double gen_s = 0.0, disc_s = 0.0;
            for (int rep = 0; rep < a.reps; ++rep) {
                const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(rep);
                auto t0 = std::chrono::steady_clock::now();
                dice::GenResult gen = dice::generate(spec, n, seed);
                dice::Dataset data =
                    d > 0 ? dice::add_distractors(gen.data, d,
                                                  seed ^ 0x9e3779b97f4a7c15ULL)
                          : std::move(gen.data);
                gen_s += seconds_since(t0);

                // Truth: adjacency of treatment and outcome in the MAG with
                // the treatment edge removed, as column indices.
                dice::NodeId wn = gen.truth.node_index(spec.treatment);
                dice::NodeId yn = gen.truth.node_index(spec.outcome);
                dice::MixedGraph m = gen.truth.manipulate(wn, yn);
                std::vector<int> truth_cols;
                for (dice::NodeId v : m.adjacent(wn)) truth_cols.push_back(v);
                for (dice::NodeId v : m.adjacent(yn)) truth_cols.push_back(v);
                std::vector<int> truth_set;
                for (int v : truth_cols)
                    if (v != wn && v != yn)
                        truth_set.push_back(data.column_index(m.label(v)));

                t0 = std::chrono::steady_clock::now();
                dice::FisherZTest test(data);
                std::vector<int> found = dice::find_candidates(
                    data, data.treatment(), data.outcome(), test, a.alpha, a.max_cond);
                disc_s += seconds_since(t0);

                dice::BenchScore s = dice::score_discovery(found, truth_set);
                precision += s.precision;
                recall += s.recall;
                f_score += s.f_score;
            }
            const double r = static_cast<double>(a.reps);
            report << n << ',' << d << ',' << a.reps << ','
                   << dice::format_double(precision / r) << ','
                   << dice::format_double(recall / r) << ','
                   << dice::format_double(f_score / r) << ','
                   << dice::format_double(gen_s / r) << ','
                   << dice::format_double(disc_s / r) << '\n';
        }
    }
    if (a.out_file.empty())
        std::cout << report.str();
    else
        write_file(a.out_file, report.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dice: local adjustment-set discovery and causal effect "
                 "estimation under hidden confounding"};
    app.require_subcommand(1);

    QueryArgs q;
    CLI::App* query = app.add_subcommand(
        "query", "Estimate the causal effect of a treatment on an outcome from CSV data");
    query->add_option("input", q.input, "input CSV file")->required();
    query->add_option("--treatment", q.treatment, "treatment column name")->required();
    query->add_option("--outcome", q.outcome, "outcome column name")->required();
    query->add_option("--alpha", q.alpha, "CI test significance level");
    query->add_option("--tau", q.tau, "sensitivity pruning threshold");
    query->add_option("--estimand", q.estimand, "ate or att")
        ->check(CLI::IsMember({"ate", "att"}));
    query->add_option("--max-cond", q.max_cond, "conditioning set size cap");
    query->add_option("--max-candidates", q.max_candidates, "candidate count cap");
    query->add_option("--bin-divisor", q.bin_divisor, "histogram bin divisor");
    query->add_option("--graph", q.graph_path, "truth graph for oracle cross-checks");
    query->add_option("--out", q.out_dir, "output directory");
    query->add_option("--seed", q.seed, "seed recorded in the run snapshot");

    GenerateArgs g;
    CLI::App* generate = app.add_subcommand(
        "generate", "Sample a synthetic dataset from a structural model spec");
    generate->add_option("spec", g.spec_path, "model spec file")->required();
    generate->add_option("--n", g.n, "sample size")->required();
    generate->add_option("--seed", g.seed, "random seed");
    generate->add_option("--distractors", g.distractors,
                         "independent noise columns (overrides the spec)");
    generate->add_option("--out", g.out_dir, "output directory");

    BenchArgs b;
    CLI::App* bench = app.add_subcommand(
        "bench", "Score candidate discovery against the model's ground truth");
    bench->add_option("spec", b.spec_path, "model spec file")->required();
    bench->add_option("--reps", b.reps, "repetitions per grid cell");
    bench->add_option("--n", b.n_grid, "sample sizes to test");
    bench->add_option("--distractors", b.distractor_grid, "distractor counts to test");
    bench->add_option("--alpha", b.alpha, "CI test significance level");
    bench->add_option("--max-cond", b.max_cond, "conditioning set size cap");
    bench->add_option("--seed", b.seed, "base seed (rep r uses seed+r)");
    bench->add_option("--out", b.out_file, "report file (default: stdout)");

    try {
        app.parse(argc, argv);
        if (*query) return run_query(q);
        if (*generate) return run_generate(g);
        if (*bench) return run_bench(b);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const dice::GraphError& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == dice::GraphError::Code::CandidateCapExceeded)
            std::cerr << "hint: raise --max-candidates or lower --alpha to shrink "
                         "the candidate set\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
