#include "dice/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace dice {
namespace {

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    throw SynthError(SynthError::Code::ParseError,
                     "spec line " + std::to_string(line) + ": " + msg);
}

double parse_real(const std::string& tok, int line) {
    double v = 0.0;
    const char* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        parse_fail(line, "expected a number, got '" + tok + "'");
    return v;
}

int parse_count(const std::string& tok, int line) {
    int v = 0;
    const char* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc{} || ptr != end || v < 0)
        parse_fail(line, "expected a non-negative integer, got '" + tok + "'");
    return v;
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double next_uniform(std::mt19937_64& rng) {
    // (0, 1), never exactly 0 or 1, so log() below is safe.
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double next_normal(std::mt19937_64& rng) {
    const double u1 = next_uniform(rng);
    const double u2 = next_uniform(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

int SemSpec::node_index(const std::string& name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].name == name) return static_cast<int>(i);
    return -1;
}

double SemSpec::true_effect() const {
    for (const SemEdge& e : edges)
        if (e.tail == treatment && e.head == outcome) return e.coef;
    return 0.0;
}

SemSpec SemSpec::parse(const std::string& text) {
    SemSpec spec;
    std::vector<bool> noise_set;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    bool intercept_seen = false, distractors_seen = false;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::vector<std::string> tok = tokenize(raw);
        if (tok.empty()) continue;

        if (tok[0] == "node") {
            if (tok.size() != 2 && (tok.size() != 3 || tok[2] != "hidden"))
                parse_fail(line_no, "expected 'node NAME [hidden]'");
            if (spec.node_index(tok[1]) >= 0)
                parse_fail(line_no, "duplicate node '" + tok[1] + "'");
            spec.nodes.push_back({tok[1], tok.size() == 3, 1.0});
            noise_set.push_back(false);
        } else if (tok[0] == "treatment" || tok[0] == "outcome") {
            if (tok.size() != 2) parse_fail(line_no, "expected '" + tok[0] + " NAME'");
            std::string& slot = tok[0] == "treatment" ? spec.treatment : spec.outcome;
            if (!slot.empty()) parse_fail(line_no, tok[0] + " already declared");
            if (spec.node_index(tok[1]) < 0)
                parse_fail(line_no, "unknown node '" + tok[1] + "'");
            slot = tok[1];
        } else if (tok[0] == "noise") {
            if (tok.size() != 4 || tok[2] != ":")
                parse_fail(line_no, "expected 'noise NAME : SD'");
            int idx = spec.node_index(tok[1]);
            if (idx < 0) parse_fail(line_no, "unknown node '" + tok[1] + "'");
            spec.nodes[idx].noise_sd = parse_real(tok[3], line_no);
            noise_set[idx] = true;
        } else if (tok[0] == "intercept") {
            if (tok.size() != 2) parse_fail(line_no, "expected 'intercept VALUE'");
            if (intercept_seen) parse_fail(line_no, "intercept already declared");
            spec.intercept = parse_real(tok[1], line_no);
            intercept_seen = true;
        } else if (tok[0] == "distractors") {
            if (tok.size() != 2) parse_fail(line_no, "expected 'distractors COUNT'");
            if (distractors_seen) parse_fail(line_no, "distractors already declared");
            spec.distractors = parse_count(tok[1], line_no);
            distractors_seen = true;
        } else if (tok.size() == 5 && tok[1] == "->" && tok[3] == ":") {
            if (spec.node_index(tok[0]) < 0)
                parse_fail(line_no, "unknown node '" + tok[0] + "'");
            if (spec.node_index(tok[2]) < 0)
                parse_fail(line_no, "unknown node '" + tok[2] + "'");
            spec.edges.push_back({tok[0], tok[2], parse_real(tok[4], line_no)});
        } else {
            parse_fail(line_no, "unrecognized directive '" + tok[0] + "'");
        }
    }
    // Unset noise scales default to 1, except the treatment's assignment
    // noise which defaults to 0.1.
    for (std::size_t i = 0; i < spec.nodes.size(); ++i)
        if (!noise_set[i])
            spec.nodes[i].noise_sd = spec.nodes[i].name == spec.treatment ? 0.1 : 1.0;
    spec.validate();
    return spec;
}

SemSpec SemSpec::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SynthError(SynthError::Code::ParseError,
                         "cannot open spec file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string SemSpec::to_text() const {
    std::ostringstream out;
    for (const SemNode& n : nodes)
        out << "node " << n.name << (n.hidden ? " hidden" : "") << '\n';
    out << "treatment " << treatment << '\n';
    out << "outcome " << outcome << '\n';
    for (const SemEdge& e : edges)
        out << e.tail << " -> " << e.head << " : " << format_double(e.coef) << '\n';
    for (const SemNode& n : nodes)
        out << "noise " << n.name << " : " << format_double(n.noise_sd) << '\n';
    out << "intercept " << format_double(intercept) << '\n';
    out << "distractors " << distractors << '\n';
    return out.str();
}

void SemSpec::validate() const {
    auto bad = [](const std::string& msg) {
        throw SynthError(SynthError::Code::BadSpec, "spec: " + msg);
    };
    if (nodes.empty()) bad("no nodes declared");
    std::set<std::string> names;
    for (const SemNode& n : nodes) {
        if (n.name.empty()) bad("empty node name");
        if (!names.insert(n.name).second) bad("duplicate node '" + n.name + "'");
        if (!(n.noise_sd >= 0.0) || !std::isfinite(n.noise_sd))
            bad("noise sd of '" + n.name + "' must be finite and non-negative");
    }
    if (treatment.empty() || node_index(treatment) < 0)
        throw SynthError(SynthError::Code::MissingRole, "spec: no treatment declared");
    if (outcome.empty() || node_index(outcome) < 0)
        throw SynthError(SynthError::Code::MissingRole, "spec: no outcome declared");
    if (treatment == outcome) bad("treatment and outcome must differ");
    if (nodes[node_index(treatment)].hidden) bad("treatment cannot be hidden");
    if (nodes[node_index(outcome)].hidden) bad("outcome cannot be hidden");
    if (!std::isfinite(intercept)) bad("intercept must be finite");
    if (distractors < 0) bad("distractors must be non-negative");

    std::set<std::pair<std::string, std::string>> seen;
    const int p = static_cast<int>(nodes.size());
    std::vector<int> indeg(p, 0);
    std::vector<std::vector<int>> children(p);
    for (const SemEdge& e : edges) {
        int t = node_index(e.tail), h = node_index(e.head);
        if (t < 0) bad("edge from unknown node '" + e.tail + "'");
        if (h < 0) bad("edge to unknown node '" + e.head + "'");
        if (!std::isfinite(e.coef)) bad("edge coefficient must be finite");
        if (t == h)
            throw SynthError(SynthError::Code::CyclicSpec,
                             "spec: self loop on '" + e.tail + "'");
        if (!seen.insert({e.tail, e.head}).second)
            bad("duplicate edge " + e.tail + " -> " + e.head);
        children[t].push_back(h);
        ++indeg[h];
    }
    int done = 0;
    std::vector<int> order;
    std::vector<bool> used(p, false);
    for (;;) {
        int pick = -1;
        for (int v = 0; v < p; ++v)
            if (!used[v] && indeg[v] == 0) {
                pick = v;
                break;
            }
        if (pick < 0) break;
        used[pick] = true;
        ++done;
        for (int c : children[pick]) --indeg[c];
    }
    if (done != p)
        throw SynthError(SynthError::Code::CyclicSpec, "spec: edges contain a cycle");
}

GenResult generate(const SemSpec& spec, int n, std::uint64_t seed) {
    spec.validate();
    if (n < 1)
        throw SynthError(SynthError::Code::BadSpec, "generate: n must be at least 1");

    const int p = static_cast<int>(spec.nodes.size());
    std::vector<std::vector<std::pair<int, double>>> incoming(p);
    std::vector<std::vector<int>> children(p);
    std::vector<int> indeg(p, 0);
    for (const SemEdge& e : spec.edges) {
        int t = spec.node_index(e.tail), h = spec.node_index(e.head);
        incoming[h].push_back({t, e.coef});
        children[t].push_back(h);
        ++indeg[h];
    }
    std::vector<int> topo;
    std::vector<bool> used(p, false);
    while (static_cast<int>(topo.size()) < p) {
        for (int v = 0; v < p; ++v)
            if (!used[v] && indeg[v] == 0) {
                topo.push_back(v);
                used[v] = true;
                for (int c : children[v]) --indeg[c];
                break;
            }
    }

    const int treatment_idx = spec.node_index(spec.treatment);
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd full(n, p);
    for (int v : topo) {
        Eigen::VectorXd lin = Eigen::VectorXd::Zero(n);
        for (const auto& [parent, coef] : incoming[v]) lin += coef * full.col(parent);
        const double sd = spec.nodes[v].noise_sd;
        if (v == treatment_idx) {
            for (int r = 0; r < n; ++r) {
                const double score = spec.intercept + lin[r] + sd * next_normal(rng);
                full(r, v) = next_uniform(rng) < sigmoid(score) ? 1.0 : 0.0;
            }
        } else {
            for (int r = 0; r < n; ++r) full(r, v) = lin[r] + sd * next_normal(rng);
        }
    }

    std::vector<std::string> observed_labels;
    std::vector<int> observed_cols;
    std::vector<bool> hidden(p, false);
    for (int v = 0; v < p; ++v) {
        hidden[v] = spec.nodes[v].hidden;
        if (!hidden[v]) {
            observed_labels.push_back(spec.nodes[v].name);
            observed_cols.push_back(v);
        }
    }
    Eigen::MatrixXd observed(n, observed_cols.size());
    for (std::size_t j = 0; j < observed_cols.size(); ++j)
        observed.col(j) = full.col(observed_cols[j]);

    std::vector<std::string> all_labels;
    std::vector<EdgeSpec> dag_edges;
    for (const SemNode& node : spec.nodes) all_labels.push_back(node.name);
    for (const SemEdge& e : spec.edges)
        dag_edges.push_back({e.tail, e.head, EdgeKind::Directed});
    MixedGraph dag = MixedGraph::build(all_labels, dag_edges);

    return GenResult{
        Dataset(std::move(observed_labels), std::move(observed), spec.treatment,
                spec.outcome),
        latent_project(dag, hidden),
        spec.true_effect(),
    };
}

Dataset add_distractors(const Dataset& data, int count, std::uint64_t seed) {
    if (count < 0)
        throw SynthError(SynthError::Code::BadSpec,
                         "add_distractors: count must be non-negative");
    std::vector<std::string> labels(data.labels().begin(), data.labels().end());
    std::set<std::string> used(labels.begin(), labels.end());
    const int p = data.cols();
    Eigen::MatrixXd values(data.rows(), p + count);
    values.leftCols(p) = data.values();
    std::mt19937_64 rng(seed);
    for (int j = 0; j < count; ++j) {
        std::string name = "D" + std::to_string(j + 1);
        while (used.count(name)) name += "_";
        used.insert(name);
        labels.push_back(name);
        for (int r = 0; r < data.rows(); ++r) values(r, p + j) = next_normal(rng);
    }
    return Dataset(std::move(labels), std::move(values), data.label(data.treatment()),
                   data.label(data.outcome()));
}

BenchScore score_discovery(const std::vector<int>& found, const std::vector<int>& truth) {
    std::vector<int> f = found, t = truth;
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    std::vector<int> both;
    std::set_intersection(f.begin(), f.end(), t.begin(), t.end(), std::back_inserter(both));

    BenchScore s;
    if (f.empty())
        s.precision = t.empty() ? 1.0 : 0.0;
    else
        s.precision = static_cast<double>(both.size()) / static_cast<double>(f.size());
    if (t.empty())
        s.recall = 1.0;
    else
        s.recall = static_cast<double>(both.size()) / static_cast<double>(t.size());
    if (s.precision > 0.0 && s.recall > 0.0)
        s.f_score = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

const std::string& bench10_text() {
    static const std::string text =
        "# Ten-variable benchmark: eight observed pretreatment covariates,\n"
        "# two hidden confounders, binary treatment W, continuous outcome Y.\n"
        "node X1\n"
        "node X2\n"
        "node X3\n"
        "node X4\n"
        "node X5\n"
        "node X6\n"
        "node X7\n"
        "node X8\n"
        "node U1 hidden\n"
        "node U2 hidden\n"
        "node W\n"
        "node Y\n"
        "treatment W\n"
        "outcome Y\n"
        "X7 -> X1 : 0.8\n"
        "X1 -> X2 : 0.8\n"
        "X1 -> Y : 0.7\n"
        "X2 -> W : 1.0\n"
        "X3 -> W : 0.6\n"
        "U1 -> X5 : 1.0\n"
        "U1 -> W : 0.8\n"
        "X8 -> X4 : 0.8\n"
        "X4 -> Y : 0.6\n"
        "U2 -> X6 : 1.0\n"
        "U2 -> Y : 1.0\n"
        "W -> Y : 1.0\n"
        "noise W : 0.1\n"
        "intercept 0.0\n"
        "distractors 0\n";
    return text;
}

SemSpec bench10_spec() { return SemSpec::parse(bench10_text()); }

}  // namespace dice
