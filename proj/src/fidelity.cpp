#include "epic/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "epic/error.hpp"

namespace epic {

Correlation pearson(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y) {
    if (x.size() != y.size())
        throw Error(Errc::LengthMismatch, std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " values");
    std::vector<double> xs, ys;
    xs.reserve(x.size());
    ys.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!x[i] || !y[i]) continue;
        xs.push_back(*x[i]);
        ys.push_back(*y[i]);
    }
    return pearson(std::span<const double>(xs), std::span<const double>(ys));
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw Error(Errc::LengthMismatch, std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " values");
    const std::size_t n = x.size();
    if (n < 2) return std::nullopt;
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Correlation cramers_v(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.size() != b.size())
        throw Error(Errc::LengthMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " values");
    std::unordered_map<std::string_view, std::size_t> rows_of, cols_of;
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    cells.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto r = rows_of.try_emplace(a[i], rows_of.size()).first->second;
        auto c = cols_of.try_emplace(b[i], cols_of.size()).first->second;
        cells.emplace_back(r, c);
    }
    const std::size_t r = rows_of.size();
    const std::size_t c = cols_of.size();
    if (std::min(r, c) <= 1) return std::nullopt;

    std::vector<double> observed(r * c, 0.0), row_sum(r, 0.0), col_sum(c, 0.0);
    for (auto [i, j] : cells) {
        observed[i * c + j] += 1.0;
        row_sum[i] += 1.0;
        col_sum[j] += 1.0;
    }
    const double n = static_cast<double>(a.size());
    double chi2 = 0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            const double expected = row_sum[i] * col_sum[j] / n;
            const double d = observed[i * c + j] - expected;
            chi2 += d * d / expected;
        }
    const double k = static_cast<double>(std::min(r, c) - 1);
    return std::clamp(std::sqrt(chi2 / (n * k)), 0.0, 1.0);
}

namespace {

std::vector<std::size_t> feature_columns(const Schema& schema, ColumnKind kind) {
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < schema.size(); ++c)
        if (c != schema.target_index() && schema.column(c).kind == kind) cols.push_back(c);
    return cols;
}

template <typename Column, typename Extract, typename Measure>
CorrelationMatrix build_matrix(const Table& table, std::span<const std::size_t> rows, ColumnKind kind,
                               Extract extract, Measure measure) {
    const auto cols = feature_columns(table.schema, kind);
    CorrelationMatrix m;
    for (auto c : cols) m.labels.push_back(table.schema.column(c).name);
    m.values.assign(cols.size() * cols.size(), std::nullopt);

    std::vector<std::vector<Column>> data(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        data[k].reserve(rows.size());
        for (auto r : rows) data[k].push_back(extract(table.rows[r][cols[k]]));
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
        // The diagonal is 1 exactly when the column is non-degenerate.
        if (measure(data[i], data[i])) m.at(i, i) = 1.0;
        for (std::size_t j = i + 1; j < cols.size(); ++j) {
            auto v = measure(data[i], data[j]);
            m.at(i, j) = v;
            m.at(j, i) = v;
        }
    }
    return m;
}

}  // namespace

CorrelationMatrix pearson_matrix(const Table& table, std::span<const std::size_t> rows) {
    return build_matrix<std::optional<double>>(
        table, rows, ColumnKind::Numerical, [](const std::string& cell) { return parse_number(cell); },
        [](const std::vector<std::optional<double>>& x, const std::vector<std::optional<double>>& y) {
            return pearson(std::span<const std::optional<double>>(x), std::span<const std::optional<double>>(y));
        });
}

CorrelationMatrix cramers_matrix(const Table& table, std::span<const std::size_t> rows) {
    return build_matrix<std::string>(
        table, rows, ColumnKind::Categorical, [](const std::string& cell) { return cell; },
        [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
            return cramers_v(std::span<const std::string>(a), std::span<const std::string>(b));
        });
}

CorrelationMatrix difference(const CorrelationMatrix& synth, const CorrelationMatrix& real) {
    if (synth.labels != real.labels) throw Error(Errc::SchemaMismatch, "matrices cover different columns");
    CorrelationMatrix d{real.labels, std::vector<Correlation>(real.values.size())};
    for (std::size_t i = 0; i < d.values.size(); ++i)
        if (synth.values[i] && real.values[i]) d.values[i] = *synth.values[i] - *real.values[i];
    return d;
}

NumericSummary summarize(std::span<const std::optional<double>> values) {
    NumericSummary s;
    std::vector<double> xs;
    for (const auto& v : values)
        if (v) xs.push_back(*v);
    if (xs.empty()) return s;
    auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    s.min = *lo;
    s.max = *hi;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    s.mean = mean;
    if (xs.size() >= 2) {
        double ss = 0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

FidelityReport build_report(const Table& real, const Table& synth) {
    if (!real.schema.compatible_with(synth.schema))
        throw Error(Errc::SchemaMismatch, "real and synthetic tables have different columns or target");

    FidelityReport report;
    std::vector<std::string> labels = real.schema.class_labels();
    for (const auto& l : synth.schema.class_labels())
        if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);

    for (const auto& label : labels) {
        const auto real_rows = real.class_rows(label);
        const auto synth_rows = synth.class_rows(label);
        ClassFidelity cf;
        cf.label = label;
        cf.real_rows = real_rows.size();
        cf.synth_rows = synth_rows.size();
        cf.pearson_real = pearson_matrix(real, real_rows);
        cf.pearson_synth = pearson_matrix(synth, synth_rows);
        cf.pearson_diff = difference(cf.pearson_synth, cf.pearson_real);
        cf.cramers_real = cramers_matrix(real, real_rows);
        cf.cramers_synth = cramers_matrix(synth, synth_rows);
        cf.cramers_diff = difference(cf.cramers_synth, cf.cramers_real);
        report.per_class.push_back(std::move(cf));

        ClassShare share{label, real_rows.size(), synth_rows.size(), 0.0, 0.0};
        if (!real.empty()) share.real_frequency = static_cast<double>(real_rows.size()) / static_cast<double>(real.size());
        if (!synth.empty())
            share.synth_frequency = static_cast<double>(synth_rows.size()) / static_cast<double>(synth.size());
        report.class_distribution.push_back(std::move(share));
    }

    for (auto c : feature_columns(real.schema, ColumnKind::Numerical)) {
        auto column_values = [c](const Table& t) {
            std::vector<std::optional<double>> v;
            v.reserve(t.size());
            for (const auto& row : t.rows) v.push_back(parse_number(row[c]));
            return v;
        };
        const auto rv = column_values(real);
        const auto sv = column_values(synth);
        report.numeric_summaries.push_back({real.schema.column(c).name, summarize(rv), summarize(sv)});
    }
    return report;
}

namespace {

nlohmann::ordered_json value_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json matrix_json(const CorrelationMatrix& m) {
    nlohmann::ordered_json j;
    j["labels"] = m.labels;
    auto& rows = j["values"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        auto row = nlohmann::ordered_json::array();
        for (std::size_t k = 0; k < m.size(); ++k) row.push_back(value_json(m.at(i, k)));
        rows.push_back(std::move(row));
    }
    return j;
}

nlohmann::ordered_json summary_json(const NumericSummary& s) {
    return {{"min", value_json(s.min)}, {"max", value_json(s.max)}, {"mean", value_json(s.mean)}, {"std", value_json(s.std)}};
}

}  // namespace

std::string to_json(const FidelityReport& report) {
    nlohmann::ordered_json doc;
    doc["cramers_v"] = "uncorrected";
    doc["difference"] = "synthetic minus real";
    doc["missing_values"] = "pairwise-dropped for pearson; own category for cramers_v";
    auto& classes = doc["per_class"] = nlohmann::ordered_json::array();
    for (const auto& cf : report.per_class) {
        classes.push_back({{"label", cf.label},
                           {"real_rows", cf.real_rows},
                           {"synthetic_rows", cf.synth_rows},
                           {"pearson_real", matrix_json(cf.pearson_real)},
                           {"pearson_synthetic", matrix_json(cf.pearson_synth)},
                           {"pearson_diff", matrix_json(cf.pearson_diff)},
                           {"cramers_real", matrix_json(cf.cramers_real)},
                           {"cramers_synthetic", matrix_json(cf.cramers_synth)},
                           {"cramers_diff", matrix_json(cf.cramers_diff)}});
    }
    auto& dist = doc["class_distribution"] = nlohmann::ordered_json::array();
    for (const auto& s : report.class_distribution)
        dist.push_back({{"label", s.label},
                        {"real_count", s.real_count},
                        {"synthetic_count", s.synth_count},
                        {"real_frequency", s.real_frequency},
                        {"synthetic_frequency", s.synth_frequency}});
    auto& sums = doc["numeric_summaries"] = nlohmann::ordered_json::array();
    for (const auto& s : report.numeric_summaries)
        sums.push_back({{"column", s.column}, {"real", summary_json(s.real)}, {"synthetic", summary_json(s.synth)}});
    return doc.dump(2) + "\n";
}

std::string to_csv(const CorrelationMatrix& matrix) {
    std::string out = "row,column,value\n";
    for (std::size_t i = 0; i < matrix.size(); ++i)
        for (std::size_t j = 0; j < matrix.size(); ++j) {
            out += matrix.labels[i] + "," + matrix.labels[j] + ",";
            if (const auto& v = matrix.at(i, j)) out += format_number(*v);
            out += "\n";
        }
    return out;
}

}  // namespace epic
