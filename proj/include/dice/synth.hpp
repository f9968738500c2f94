#ifndef DICE_SYNTH_HPP
#define DICE_SYNTH_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dice/dataset.hpp"
#include "dice/graph.hpp"

namespace dice {

class SynthError : public std::runtime_error {
public:
    enum class Code { ParseError, CyclicSpec, MissingRole, BadSpec };
    SynthError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

struct SemNode {
    std::string name;
    bool hidden = false;
    double noise_sd = 1.0;  // treatment default is 0.1 (assignment-score noise)
};

struct SemEdge {
    std::string tail;
    std::string head;
    double coef = 0.0;
};

/// Declarative linear-Gaussian structural model with hidden variables and a
/// Bernoulli(sigmoid) treatment.  Text format, one directive per line:
///   node NAME [hidden]
///   treatment NAME / outcome NAME
///   TAIL -> HEAD : COEF
///   noise NAME : SD
///   intercept VALUE        (treatment assignment intercept)
///   distractors COUNT
/// `#` starts a comment; defaults: noise 1.0 (treatment 0.1), intercept 0,
/// distractors 0.
struct SemSpec {
    std::vector<SemNode> nodes;
    std::vector<SemEdge> edges;
    std::string treatment;
    std::string outcome;
    double intercept = 0.0;
    int distractors = 0;

    static SemSpec parse(const std::string& text);
    static SemSpec from_file(const std::string& path);
    std::string to_text() const;

    // Structural checks: known/unique names, roles present and observed,
    // acyclic edges, sane numbers.  Parse runs this automatically.
    void validate() const;

    int node_index(const std::string& name) const;  // -1 when absent
    // Coefficient on the treatment -> outcome edge (0 when absent).
    double true_effect() const;
};

struct GenResult {
    Dataset data;           // observed columns only, in declaration order
    MixedGraph truth;       // latent projection of the spec's DAG
    double true_effect = 0.0;
};

// Topological-order sampling: linear node = coefficient-weighted parents
// plus Gaussian noise; treatment ~ Bernoulli(sigmoid(intercept + weighted
// parents + noise)).  Reproducible: the generator is seeded and all draws
// use a fixed internal transform.
GenResult generate(const SemSpec& spec, int n, std::uint64_t seed);

// Appends `count` independent standard-normal pretreatment columns with
// fresh labels; original columns are copied bit-for-bit.
Dataset add_distractors(const Dataset& data, int count, std::uint64_t seed);

struct BenchScore {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
};

// Set-recovery metrics; empty `found` scores precision 1 against an empty
// truth and 0 otherwise, empty truth scores recall 1.
BenchScore score_discovery(const std::vector<int>& found, const std::vector<int>& truth);

// The ten-variable benchmark model shipped with the project (also at
// data/bench10.sem): eight observed pretreatment covariates, two hidden
// confounders, treatment W, outcome Y, true effect 1.0.
const std::string& bench10_text();
SemSpec bench10_spec();

}  // namespace dice

#endif
