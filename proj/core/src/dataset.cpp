#include "modea/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "modea/error.hpp"

namespace modea {

namespace {

std::string trim(std::string_view s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) {
        return {};
    }
    auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

std::optional<double> parse_double(const std::string& field) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last) {
        return std::nullopt;
    }
    return value;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// Lines like "#inputs=3" or "# seed=7"; returns key/value when well formed.
std::optional<std::pair<std::string, std::string>> parse_directive(std::string_view line) {
    auto body = trim(line.substr(1));
    auto eq = body.find('=');
    if (eq == std::string::npos) {
        return std::nullopt;
    }
    return std::make_pair(trim(std::string_view(body).substr(0, eq)),
                          trim(std::string_view(body).substr(eq + 1)));
}

std::optional<std::size_t> infer_split_from_names(const std::vector<std::string>& names) {
    auto starts_with = [](const std::string& s, char c) {
        return !s.empty() && std::toupper(static_cast<unsigned char>(s.front())) == c;
    };
    std::size_t inputs = 0;
    while (inputs < names.size() && starts_with(names[inputs], 'I')) {
        ++inputs;
    }
    for (std::size_t i = inputs; i < names.size(); ++i) {
        if (!starts_with(names[i], 'O')) {
            return std::nullopt;
        }
    }
    return inputs;
}

}  // namespace

Dataset::Dataset(std::vector<std::string> input_names, std::vector<std::string> output_names,
                 std::vector<BranchRecord> records)
    : input_names_(std::move(input_names)),
      output_names_(std::move(output_names)),
      records_(std::move(records)) {
    if (input_names_.empty() || output_names_.empty()) {
        throw Error(ErrorCode::DimensionMismatch, "dataset needs at least one input and one output");
    }
    if (records_.empty()) {
        throw Error(ErrorCode::TooFewRows, "dataset has no records");
    }
    std::unordered_set<std::string> seen;
    for (const auto& r : records_) {
        if (!seen.insert(r.id).second) {
            throw Error(ErrorCode::DuplicateId, "duplicate record id '" + r.id + "'");
        }
        if (r.inputs.size() != input_names_.size() || r.outputs.size() != output_names_.size()) {
            throw Error(ErrorCode::DimensionMismatch, "record '" + r.id + "' has wrong arity");
        }
        for (std::size_t i = 0; i < r.inputs.size(); ++i) {
            if (!(r.inputs[i] > 0.0) || !std::isfinite(r.inputs[i])) {
                throw Error(ErrorCode::NonPositiveInput,
                            "record '" + r.id + "' input " + input_names_[i] + " must be > 0");
            }
        }
        bool any_positive = false;
        for (std::size_t i = 0; i < r.outputs.size(); ++i) {
            if (!(r.outputs[i] >= 0.0) || !std::isfinite(r.outputs[i])) {
                throw Error(ErrorCode::InvalidOutput,
                            "record '" + r.id + "' output " + output_names_[i] + " must be >= 0");
            }
            any_positive = any_positive || r.outputs[i] > 0.0;
        }
        if (!any_positive) {
            throw Error(ErrorCode::InvalidOutput, "record '" + r.id + "' has no positive output");
        }
    }
}

std::vector<std::string> Dataset::feature_names() const {
    std::vector<std::string> names = input_names_;
    names.insert(names.end(), output_names_.begin(), output_names_.end());
    return names;
}

std::optional<std::size_t> Dataset::find(const std::string& id) const {
    for (std::size_t i = 0; i < records_.size(); ++i) {
        if (records_[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

Eigen::MatrixXd Dataset::feature_matrix() const {
    const auto m = input_count();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(feature_count()));
    for (std::size_t row = 0; row < size(); ++row) {
        const auto& r = records_[row];
        for (std::size_t i = 0; i < m; ++i) {
            x(row, i) = r.inputs[i];
        }
        for (std::size_t o = 0; o < r.outputs.size(); ++o) {
            x(row, m + o) = r.outputs[o];
        }
    }
    return x;
}

Dataset parse_csv(const std::string& text, const CsvOptions& options) {
    std::istringstream in(text);
    std::string line;
    std::optional<std::size_t> directive_inputs;
    std::vector<std::string> header;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        auto trimmed = trim(line);
        if (trimmed.empty()) {
            continue;
        }
        if (trimmed.front() == '#') {
            auto kv = parse_directive(trimmed);
            if (kv && kv->first == "inputs") {
                auto v = parse_double(kv->second);
                if (!v || *v < 1 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
                    throw Error(ErrorCode::MalformedRow, "bad #inputs directive on line " +
                                                             std::to_string(line_no));
                }
                directive_inputs = static_cast<std::size_t>(*v);
            }
            continue;
        }
        header = split_fields(trimmed);
        break;
    }
    if (header.size() < 3) {
        throw Error(ErrorCode::MalformedRow, "header needs an id column, inputs, and outputs");
    }

    std::vector<std::string> value_names(header.begin() + 1, header.end());
    std::optional<std::size_t> m = options.input_count ? options.input_count : directive_inputs;
    if (!m) {
        m = infer_split_from_names(value_names);
    }
    if (!m) {
        throw Error(ErrorCode::MissingInputCount,
                    "input column count not given by option, #inputs= directive, or I*/O* names");
    }
    if (*m < 1 || *m >= value_names.size()) {
        throw Error(ErrorCode::DimensionMismatch, "input count " + std::to_string(*m) +
                                                      " leaves no outputs");
    }

    std::vector<std::string> input_names(value_names.begin(), value_names.begin() + *m);
    std::vector<std::string> output_names(value_names.begin() + *m, value_names.end());

    std::vector<BranchRecord> records;
    std::unordered_set<std::string> ids;
    while (std::getline(in, line)) {
        ++line_no;
        auto trimmed = trim(line);
        if (trimmed.empty() || trimmed.front() == '#') {
            continue;
        }
        auto fields = split_fields(trimmed);
        if (fields.size() != header.size()) {
            throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + " has " +
                                                     std::to_string(fields.size()) + " fields, expected " +
                                                     std::to_string(header.size()));
        }
        BranchRecord rec;
        rec.id = fields[0];
        if (!ids.insert(rec.id).second) {
            throw Error(ErrorCode::DuplicateId, "duplicate record id '" + rec.id + "' on line " +
                                                    std::to_string(line_no));
        }
        for (std::size_t c = 1; c < fields.size(); ++c) {
            auto v = parse_double(fields[c]);
            if (!v) {
                throw Error(ErrorCode::MalformedRow, "non-numeric field '" + fields[c] + "' in row '" +
                                                         rec.id + "'");
            }
            (c <= *m ? rec.inputs : rec.outputs).push_back(*v);
        }
        records.push_back(std::move(rec));
    }
    return Dataset(std::move(input_names), std::move(output_names), std::move(records));
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), options);
}

std::string format_csv(const Dataset& data, std::optional<std::uint64_t> seed) {
    std::ostringstream out;
    if (seed) {
        out << "# seed=" << *seed << '\n';
    }
    out << "#inputs=" << data.input_count() << '\n';
    out << "id";
    for (const auto& name : data.feature_names()) {
        out << ',' << name;
    }
    out << '\n';
    for (const auto& r : data.records()) {
        out << r.id;
        for (double v : r.inputs) {
            out << ',' << format_double(v);
        }
        for (double v : r.outputs) {
            out << ',' << format_double(v);
        }
        out << '\n';
    }
    return out.str();
}

void write_csv(const Dataset& data, const std::filesystem::path& path,
               std::optional<std::uint64_t> seed) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
    out << format_csv(data, seed);
}

Eigen::MatrixXd NormalizationStats::apply(const Eigen::MatrixXd& raw) const {
    if (raw.cols() != means.size()) {
        throw Error(ErrorCode::DimensionMismatch, "normalization width mismatch");
    }
    return (raw.rowwise() - means.transpose()).array().rowwise() / stddevs.transpose().array();
}

Eigen::VectorXd NormalizationStats::apply_row(const Eigen::VectorXd& raw) const {
    if (raw.size() != means.size()) {
        throw Error(ErrorCode::DimensionMismatch, "normalization width mismatch");
    }
    return (raw - means).cwiseQuotient(stddevs);
}

Eigen::MatrixXd NormalizationStats::invert(const Eigen::MatrixXd& normalized) const {
    if (normalized.cols() != means.size()) {
        throw Error(ErrorCode::DimensionMismatch, "normalization width mismatch");
    }
    return (normalized.array().rowwise() * stddevs.transpose().array()).matrix().rowwise() +
           means.transpose();
}

NormalizationStats fit_normalization(const Eigen::MatrixXd& raw) {
    const auto n = raw.rows();
    if (n < 2) {
        throw Error(ErrorCode::TooFewRows, "normalization needs at least 2 rows");
    }
    NormalizationStats stats;
    stats.means = raw.colwise().mean().transpose();
    stats.stddevs.resize(raw.cols());
    stats.constant.assign(static_cast<std::size_t>(raw.cols()), false);
    for (Eigen::Index c = 0; c < raw.cols(); ++c) {
        double ss = (raw.col(c).array() - stats.means(c)).square().sum();
        double sd = std::sqrt(ss / static_cast<double>(n - 1));
        double scale = std::max(1.0, std::abs(stats.means(c)));
        if (!(sd > 1e-12 * scale)) {
            spdlog::warn("feature column {} is constant; centering only", c);
            sd = 1.0;
            stats.constant[static_cast<std::size_t>(c)] = true;
        }
        stats.stddevs(c) = sd;
    }
    return stats;
}

NormalizedFeatures normalize(const Eigen::MatrixXd& raw) {
    NormalizedFeatures out;
    out.stats = fit_normalization(raw);
    out.values = out.stats.apply(raw);
    return out;
}

NormalizedFeatures normalize(const Dataset& data) {
    return normalize(data.feature_matrix());
}

}  // namespace modea
