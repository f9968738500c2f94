#include "dice/effect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace dice {
namespace {

void require_binary_treatment(const Dataset& data, int w) {
    if (w < 0 || w >= data.cols())
        throw EffectError(EffectError::Code::BadColumns,
                          "effect: treatment column index out of range");
    if (data.kind(w) != ColumnKind::Binary)
        throw DataError(DataError::Code::NonBinaryTreatment,
                        "effect: treatment column '" + data.label(w) + "' is not binary");
}

// y < 0 skips the outcome checks (propensity fitting has no outcome column).
void validate_effect_columns(const Dataset& data, int w, int y,
                             const std::vector<int>& z) {
    require_binary_treatment(data, w);
    if (y >= 0 && (y >= data.cols() || y == w))
        throw EffectError(EffectError::Code::BadColumns,
                          "effect: outcome column index invalid");
    std::vector<int> seen = z;
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (seen[i] < 0 || seen[i] >= data.cols())
            throw EffectError(EffectError::Code::BadColumns,
                              "effect: adjustment column index out of range");
        if (seen[i] == w || seen[i] == y)
            throw EffectError(EffectError::Code::BadColumns,
                              "effect: adjustment set overlaps treatment or outcome");
        if (i > 0 && seen[i] == seen[i - 1])
            throw EffectError(EffectError::Code::BadColumns,
                              "effect: duplicate adjustment column");
    }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Unique pool scores in ascending order; each keeps the lowest row index
// holding that exact score, which is the match under the tie-break rule.
struct ScoreIndex {
    std::vector<double> score;
    std::vector<int> row;

    ScoreIndex(const std::vector<double>& all, const std::vector<int>& pool) {
        std::vector<int> order = pool;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return all[a] != all[b] ? all[a] < all[b] : a < b;
        });
        for (int r : order) {
            if (!score.empty() && score.back() == all[r]) continue;
            score.push_back(all[r]);
            row.push_back(r);
        }
    }

    // Row index of the nearest pool entry; distance ties between the scores
    // below and above resolve to the lower row index.
    int match(double s) const {
        auto it = std::lower_bound(score.begin(), score.end(), s);
        std::size_t hi = static_cast<std::size_t>(it - score.begin());
        if (hi == 0) return row[0];
        if (hi == score.size()) return row.back();
        double d_lo = s - score[hi - 1];
        double d_hi = score[hi] - s;
        if (d_lo < d_hi) return row[hi - 1];
        if (d_hi < d_lo) return row[hi];
        return std::min(row[hi - 1], row[hi]);
    }
};

}  // namespace

EffectEstimate difference_of_means(const Dataset& data, int w, int y) {
    validate_effect_columns(data, w, y, {});
    const Eigen::MatrixXd& v = data.values();
    double sum1 = 0.0, sum0 = 0.0;
    long n1 = 0, n0 = 0;
    for (int r = 0; r < data.rows(); ++r) {
        if (v(r, w) == 1.0) {
            sum1 += v(r, y);
            ++n1;
        } else {
            sum0 += v(r, y);
            ++n0;
        }
    }
    if (n1 == 0 || n0 == 0)
        throw EffectError(EffectError::Code::EmptyArm,
                          "difference_of_means: a treatment arm is empty");
    EffectEstimate out;
    out.value = sum1 / n1 - sum0 / n0;
    out.estimand = Estimand::Ate;
    return out;
}

EffectEstimate stratified_adjustment(const Dataset& data, int w, int y,
                                     const std::vector<int>& z) {
    validate_effect_columns(data, w, y, z);
    if (z.empty()) {
        EffectEstimate out = difference_of_means(data, w, y);
        return out;
    }
    const Eigen::MatrixXd& v = data.values();
    struct Stratum {
        double sum1 = 0.0, sum0 = 0.0;
        long n1 = 0, n0 = 0, n = 0;
    };
    std::map<std::vector<double>, Stratum> strata;
    std::vector<double> key(z.size());
    for (int r = 0; r < data.rows(); ++r) {
        for (std::size_t k = 0; k < z.size(); ++k) key[k] = v(r, z[k]);
        Stratum& s = strata[key];
        ++s.n;
        if (v(r, w) == 1.0) {
            s.sum1 += v(r, y);
            ++s.n1;
        } else {
            s.sum0 += v(r, y);
            ++s.n0;
        }
    }
    double ce = 0.0;
    const double n = static_cast<double>(data.rows());
    for (const auto& [k, s] : strata) {
        if (s.n1 == 0 || s.n0 == 0)
            throw EffectError(EffectError::Code::EmptyStratumArm,
                              "stratified_adjustment: a stratum lacks one arm");
        ce += (s.sum1 / s.n1 - s.sum0 / s.n0) * (s.n / n);
    }
    EffectEstimate out;
    out.value = ce;
    out.estimand = Estimand::Ate;
    out.adjustment = z;
    std::sort(out.adjustment.begin(), out.adjustment.end());
    return out;
}

PropensityFit logistic_propensity_fit(const Dataset& data, int w,
                                      const std::vector<int>& z) {
    if (z.empty())
        throw EffectError(EffectError::Code::BadColumns,
                          "logistic_propensity: adjustment set is empty");
    validate_effect_columns(data, w, -1, z);
    const int n = data.rows();
    const int m = static_cast<int>(z.size()) + 1;
    Eigen::MatrixXd x(n, m);
    x.col(0).setOnes();
    for (std::size_t k = 0; k < z.size(); ++k) x.col(static_cast<int>(k) + 1) = data.column(z[k]);
    Eigen::VectorXd t = data.column(w);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < m)
        throw EffectError(EffectError::Code::RankDeficient,
                          "logistic_propensity: design matrix is rank deficient");

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
    PropensityFit fit;
    Eigen::VectorXd mu(n), wgt(n);
    for (fit.iterations = 0; fit.iterations < 100;) {
        Eigen::VectorXd eta = x * beta;
        for (int r = 0; r < n; ++r) {
            mu[r] = sigmoid(eta[r]);
            wgt[r] = std::max(mu[r] * (1.0 - mu[r]), 1e-10);
        }
        Eigen::MatrixXd h = x.transpose() * wgt.asDiagonal() * x;
        Eigen::VectorXd grad = x.transpose() * (t - mu);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
        if (ldlt.info() != Eigen::Success)
            throw EffectError(EffectError::Code::RankDeficient,
                              "logistic_propensity: normal equations not solvable");
        Eigen::VectorXd step = ldlt.solve(grad);
        beta += step;
        ++fit.iterations;
        if (step.cwiseAbs().maxCoeff() < 1e-8) {
            fit.converged = true;
            break;
        }
    }

    Eigen::VectorXd eta = x * beta;
    fit.scores.resize(n);
    bool pinned = false;
    for (int r = 0; r < n; ++r) {
        fit.scores[r] = sigmoid(eta[r]);
        if (fit.scores[r] <= 1e-12 || fit.scores[r] >= 1.0 - 1e-12) pinned = true;
    }
    if (!fit.converged && pinned && beta.cwiseAbs().maxCoeff() > 100.0)
        throw EffectError(EffectError::Code::SeparationDetected,
                          "logistic_propensity: perfect separation detected");
    fit.coefficients = beta;
    return fit;
}

std::vector<double> logistic_propensity(const Dataset& data, int w,
                                        const std::vector<int>& z) {
    return logistic_propensity_fit(data, w, z).scores;
}

EffectEstimate psm_effect(const Dataset& data, int w, int y,
                          const std::vector<int>& z, Estimand estimand) {
    validate_effect_columns(data, w, y, z);
    const Eigen::MatrixXd& v = data.values();
    std::vector<int> treated, control;
    for (int r = 0; r < data.rows(); ++r)
        (v(r, w) == 1.0 ? treated : control).push_back(r);
    if (treated.empty() || control.empty())
        throw EffectError(EffectError::Code::EmptyArm, "psm_effect: a treatment arm is empty");

    EffectEstimate out;
    out.estimand = estimand;
    out.adjustment = z;
    std::sort(out.adjustment.begin(), out.adjustment.end());

    if (z.empty()) {
        out.value = difference_of_means(data, w, y).value;
        return out;
    }

    std::vector<double> score = logistic_propensity(data, w, z);
    auto [mn, mx] = std::minmax_element(score.begin(), score.end());
    if (*mx - *mn <= 1e-12) {
        out.value = difference_of_means(data, w, y).value;
        out.degenerate_scores = true;
        return out;
    }

    ScoreIndex control_index(score, control);
    double att = 0.0;
    for (int r : treated) att += v(r, y) - v(control_index.match(score[r]), y);
    if (estimand == Estimand::Att) {
        out.value = att / static_cast<double>(treated.size());
        out.n_matched = static_cast<int>(treated.size());
        return out;
    }

    ScoreIndex treated_index(score, treated);
    double atc = 0.0;
    for (int r : control) atc += v(treated_index.match(score[r]), y) - v(r, y);
    out.value = (att + atc) / static_cast<double>(data.rows());
    out.n_matched = data.rows();
    return out;
}

}  // namespace dice
