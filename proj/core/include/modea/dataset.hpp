#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace modea {

/// One decision-making unit: m consumed inputs and s produced outputs.
struct BranchRecord {
    std::string id;
    std::vector<double> inputs;
    std::vector<double> outputs;

    bool operator==(const BranchRecord&) const = default;
};

/// Immutable, validated table of DMUs.
///
/// Invariants enforced on construction: at least one record, input, and
/// output; unique ids; every input strictly positive; every output
/// non-negative with at least one positive output per record. Feature order
/// everywhere in the library is inputs first, then outputs.
class Dataset {
public:
    Dataset(std::vector<std::string> input_names, std::vector<std::string> output_names,
            std::vector<BranchRecord> records);

    std::size_t size() const noexcept { return records_.size(); }
    std::size_t input_count() const noexcept { return input_names_.size(); }
    std::size_t output_count() const noexcept { return output_names_.size(); }
    std::size_t feature_count() const noexcept { return input_count() + output_count(); }

    const std::vector<std::string>& input_names() const noexcept { return input_names_; }
    const std::vector<std::string>& output_names() const noexcept { return output_names_; }
    std::vector<std::string> feature_names() const;

    const std::vector<BranchRecord>& records() const noexcept { return records_; }
    const BranchRecord& operator[](std::size_t i) const { return records_[i]; }

    /// Index of the record with the given id, if any.
    std::optional<std::size_t> find(const std::string& id) const;

    /// Raw n x (m+s) matrix, inputs then outputs.
    Eigen::MatrixXd feature_matrix() const;

    bool operator==(const Dataset&) const = default;

private:
    std::vector<std::string> input_names_;
    std::vector<std::string> output_names_;
    std::vector<BranchRecord> records_;
};

struct CsvOptions {
    // Number of input columns after the id column. When unset the loader
    // uses the `#inputs=<m>` directive, then I*/O* header prefixes.
    std::optional<std::size_t> input_count;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(const std::string& text, const CsvOptions& options = {});

/// Writes the CSV dialect understood by load_csv. The `#inputs=` directive is
/// always emitted; `seed` adds a `# seed=<n>` comment line.
void write_csv(const Dataset& data, const std::filesystem::path& path,
               std::optional<std::uint64_t> seed = std::nullopt);
std::string format_csv(const Dataset& data, std::optional<std::uint64_t> seed = std::nullopt);

/// Per-column z-score parameters (sample standard deviation).
struct NormalizationStats {
    Eigen::VectorXd means;
    Eigen::VectorXd stddevs;
    std::vector<bool> constant;  // columns whose divisor was forced to 1

    Eigen::MatrixXd apply(const Eigen::MatrixXd& raw) const;
    Eigen::VectorXd apply_row(const Eigen::VectorXd& raw) const;
    Eigen::MatrixXd invert(const Eigen::MatrixXd& normalized) const;
};

struct NormalizedFeatures {
    Eigen::MatrixXd values;
    NormalizationStats stats;
};

NormalizationStats fit_normalization(const Eigen::MatrixXd& raw);
NormalizedFeatures normalize(const Eigen::MatrixXd& raw);
NormalizedFeatures normalize(const Dataset& data);

}  // namespace modea
