#include "dice/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dice {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& cell, int row, int col) {
    std::string s = trim(cell);
    if (s.empty())
        throw DataError(DataError::Code::MissingValue,
                        "missing value at data row " + std::to_string(row) +
                            ", column " + std::to_string(col + 1));
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw DataError(DataError::Code::ParseError,
                        "cannot parse '" + s + "' at data row " + std::to_string(row) +
                            ", column " + std::to_string(col + 1));
    if (!std::isfinite(v))
        throw DataError(DataError::Code::MissingValue,
                        "non-finite value at data row " + std::to_string(row) +
                            ", column " + std::to_string(col + 1));
    return v;
}

}  // namespace

// Shortest round-trip decimal representation.
std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

Dataset::Dataset(std::vector<std::string> labels, Eigen::MatrixXd values,
                 const std::string& treatment, const std::string& outcome)
    : labels_(std::move(labels)), values_(std::move(values)) {
    if (static_cast<int>(labels_.size()) != values_.cols())
        throw DataError(DataError::Code::BadShape, "label count does not match columns");
    if (values_.rows() < 1 || values_.cols() < 2)
        throw DataError(DataError::Code::BadShape,
                        "dataset needs at least 1 row and 2 columns");
    for (std::size_t i = 0; i < labels_.size(); ++i)
        for (std::size_t j = i + 1; j < labels_.size(); ++j)
            if (labels_[i] == labels_[j])
                throw DataError(DataError::Code::DuplicateLabel,
                                "duplicate column label '" + labels_[i] + "'");

    treatment_ = column_index(treatment);
    outcome_ = column_index(outcome);
    if (treatment_ == outcome_)
        throw DataError(DataError::Code::BadShape,
                        "treatment and outcome must be distinct columns");

    kinds_.resize(labels_.size());
    for (int j = 0; j < cols(); ++j) {
        bool binary = true;
        for (int i = 0; i < rows() && binary; ++i)
            binary = values_(i, j) == 0.0 || values_(i, j) == 1.0;
        kinds_[j] = binary ? ColumnKind::Binary : ColumnKind::Continuous;
    }
    if (kinds_[treatment_] != ColumnKind::Binary)
        throw DataError(DataError::Code::NonBinaryTreatment,
                        "treatment column '" + labels_[treatment_] +
                            "' must only contain 0/1 values");

    // Correlation cache; constant columns get zero off-diagonals.
    const int n = rows(), p = cols();
    Eigen::MatrixXd centered = values_.rowwise() - values_.colwise().mean();
    Eigen::VectorXd norms(p);
    for (int j = 0; j < p; ++j) norms(j) = centered.col(j).norm();
    corr_ = Eigen::MatrixXd::Zero(p, p);
    if (n > 1) {
        Eigen::MatrixXd cross = centered.transpose() * centered;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j)
                corr_(i, j) = (norms(i) > 0 && norms(j) > 0)
                                  ? cross(i, j) / (norms(i) * norms(j))
                                  : 0.0;
    }
    corr_.diagonal().setOnes();
}

int Dataset::column_index(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
        throw DataError(DataError::Code::UnknownColumn, "unknown column '" + label + "'");
    return static_cast<int>(it - labels_.begin());
}

Role Dataset::role(int j) const {
    if (j == treatment_) return Role::Treatment;
    if (j == outcome_) return Role::Outcome;
    return Role::Pretreatment;
}

Dataset Dataset::from_csv(std::istream& in, const std::string& treatment,
                          const std::string& outcome) {
    std::string line;
    if (!std::getline(in, line))
        throw DataError(DataError::Code::ParseError, "empty input: missing header row");
    std::vector<std::string> labels;
    {
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) labels.push_back(trim(tok));
    }
    const int p = static_cast<int>(labels.size());

    std::vector<double> cells;
    int n = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++n;
        std::stringstream ss(line);
        std::string tok;
        int j = 0;
        while (std::getline(ss, tok, ',')) {
            if (j >= p)
                throw DataError(DataError::Code::ParseError,
                                "data row " + std::to_string(n) + " has more than " +
                                    std::to_string(p) + " cells");
            cells.push_back(parse_cell(tok, n, j));
            ++j;
        }
        if (j != p)
            throw DataError(DataError::Code::MissingValue,
                            "data row " + std::to_string(n) + " has " +
                                std::to_string(j) + " cells, expected " +
                                std::to_string(p));
    }
    Eigen::MatrixXd values(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) values(i, j) = cells[static_cast<std::size_t>(i) * p + j];
    return Dataset(std::move(labels), std::move(values), treatment, outcome);
}

Dataset Dataset::from_csv_file(const std::string& path, const std::string& treatment,
                               const std::string& outcome) {
    std::ifstream in(path);
    if (!in)
        throw DataError(DataError::Code::ParseError, "cannot open '" + path + "'");
    return from_csv(in, treatment, outcome);
}

void Dataset::to_csv(std::ostream& out) const {
    for (int j = 0; j < cols(); ++j) {
        if (j) out << ',';
        out << labels_[j];
    }
    out << '\n';
    for (int i = 0; i < rows(); ++i) {
        for (int j = 0; j < cols(); ++j) {
            if (j) out << ',';
            out << format_double(values_(i, j));
        }
        out << '\n';
    }
}

}  // namespace dice
