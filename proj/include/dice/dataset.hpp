#ifndef DICE_DATASET_HPP
#define DICE_DATASET_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace dice {

enum class ColumnKind { Binary, Continuous };
enum class Role { Treatment, Outcome, Pretreatment };

class DataError : public std::runtime_error {
public:
    enum class Code {
        ParseError,
        MissingValue,
        DuplicateLabel,
        UnknownColumn,
        NonBinaryTreatment,
        BadShape,
    };
    DataError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

// Shortest decimal representation that round-trips the exact double; the
// one formatter used for every numeric artifact so outputs are byte-stable.
std::string format_double(double v);

/// Column-typed numeric table with a designated binary treatment column
/// and an outcome column; every other column is pretreatment.  Immutable
/// after construction; the column correlation matrix is computed once.
class Dataset {
public:
    Dataset(std::vector<std::string> labels, Eigen::MatrixXd values,
            const std::string& treatment, const std::string& outcome);

    // Header row of labels, numeric body.  Empty or non-numeric cells are
    // rejected with row/column diagnostics.
    static Dataset from_csv(std::istream& in, const std::string& treatment,
                            const std::string& outcome);
    static Dataset from_csv_file(const std::string& path, const std::string& treatment,
                                 const std::string& outcome);
    void to_csv(std::ostream& out) const;

    int rows() const { return static_cast<int>(values_.rows()); }
    int cols() const { return static_cast<int>(values_.cols()); }
    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::VectorXd column(int j) const { return values_.col(j); }

    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(int j) const { return labels_.at(j); }
    int column_index(const std::string& label) const;  // DataError::UnknownColumn

    int treatment() const { return treatment_; }
    int outcome() const { return outcome_; }
    Role role(int j) const;
    ColumnKind kind(int j) const { return kinds_.at(j); }

    // Pearson correlation matrix of all columns (cached at construction).
    const Eigen::MatrixXd& correlation() const { return corr_; }

private:
    std::vector<std::string> labels_;
    Eigen::MatrixXd values_;
    std::vector<ColumnKind> kinds_;
    int treatment_ = -1;
    int outcome_ = -1;
    Eigen::MatrixXd corr_;
};

}  // namespace dice

#endif
