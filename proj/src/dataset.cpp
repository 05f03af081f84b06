#include "segmenter/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "segmenter/rng.hpp"
#include "segmenter/textio.hpp"

namespace segmenter {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!cells.empty() && !cells.back().empty() && cells.back().back() == '\r')
        cells.back().pop_back();
    return cells;
}

std::vector<std::string> non_empty_lines(const std::string& text) {
    std::vector<std::string> lines;
    size_t start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        std::string line =
            nl == std::string::npos ? text.substr(start) : text.substr(start, nl - start);
        if (!line.empty() && line != "\r") lines.push_back(std::move(line));
        if (nl == std::string::npos) break;
        start = nl + 1;
    }
    return lines;
}

}  // namespace

void Dataset::validate() const {
    if (values.rows < 1) throw std::invalid_argument("dataset has no rows");
    if (values.cols < 1) throw std::invalid_argument("dataset has no columns");
    if (static_cast<int>(feature_names.size()) != values.cols)
        throw std::invalid_argument("feature name count does not match columns");
    if (static_cast<int>(row_ids.size()) != values.rows)
        throw std::invalid_argument("row id count does not match rows");
    for (double v : values.data)
        if (!std::isfinite(v)) throw std::invalid_argument("dataset contains a non-finite value");
}

Dataset Dataset::subset(const std::vector<int>& rows) const {
    Dataset out;
    out.values = Matrix(static_cast<int>(rows.size()), values.cols);
    out.feature_names = feature_names;
    out.row_ids.reserve(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) {
        int src = rows[r];
        if (src < 0 || src >= values.rows) throw std::out_of_range("subset row out of range");
        for (int c = 0; c < values.cols; ++c) out.values(static_cast<int>(r), c) = values(src, c);
        out.row_ids.push_back(row_ids[src]);
    }
    return out;
}

Dataset load_csv(const std::filesystem::path& path, bool has_header) {
    std::string text = read_file(path);
    std::vector<std::string> lines = non_empty_lines(text);

    size_t first_data = has_header ? 1 : 0;
    if (lines.size() <= first_data)
        throw std::runtime_error(path.string() + ": no rows of data");

    Dataset d;
    if (has_header) {
        d.feature_names = split_line(lines[0]);
    }

    size_t n_rows = lines.size() - first_data;
    size_t n_cols = has_header ? d.feature_names.size() : split_line(lines[first_data]).size();
    if (n_cols == 0) throw std::runtime_error(path.string() + ": no columns");
    if (!has_header) {
        for (size_t c = 0; c < n_cols; ++c) d.feature_names.push_back("f" + std::to_string(c));
    }

    d.values = Matrix(static_cast<int>(n_rows), static_cast<int>(n_cols));
    for (size_t r = 0; r < n_rows; ++r) {
        std::vector<std::string> cells = split_line(lines[first_data + r]);
        if (cells.size() != n_cols)
            throw std::runtime_error(path.string() + ": row " + std::to_string(r + 1) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(n_cols));
        for (size_t c = 0; c < n_cols; ++c) {
            double v = 0;
            if (!parse_double(cells[c], v))
                throw std::runtime_error(path.string() + ": cannot parse '" + cells[c] +
                                         "' at row " + std::to_string(r + 1) + ", column " +
                                         std::to_string(c + 1));
            d.values(static_cast<int>(r), static_cast<int>(c)) = v;
        }
        d.row_ids.push_back(std::to_string(r));
    }
    d.validate();
    return d;
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
    std::string out;
    for (size_t c = 0; c < d.feature_names.size(); ++c) {
        if (c) out += ',';
        out += d.feature_names[c];
    }
    out += '\n';
    for (int r = 0; r < d.values.rows; ++r) {
        for (int c = 0; c < d.values.cols; ++c) {
            if (c) out += ',';
            out += format_double(d.values(r, c));
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

Scaler Scaler::fit(const Dataset& d) {
    d.validate();
    int n = d.n_points(), m = d.n_features();
    Scaler s;
    s.means.assign(m, 0.0);
    s.stds.assign(m, 0.0);
    for (int c = 0; c < m; ++c) {
        double sum = 0;
        for (int r = 0; r < n; ++r) sum += d.values(r, c);
        s.means[c] = sum / n;
        double ss = 0;
        for (int r = 0; r < n; ++r) {
            double dv = d.values(r, c) - s.means[c];
            ss += dv * dv;
        }
        s.stds[c] = std::sqrt(ss / n);
    }
    return s;
}

Dataset Scaler::apply(const Dataset& d) const {
    if (d.n_features() != static_cast<int>(means.size()))
        throw std::invalid_argument("scaler fitted on a different column count");
    Dataset out = d;
    for (int c = 0; c < d.n_features(); ++c) {
        for (int r = 0; r < d.n_points(); ++r) {
            out.values(r, c) =
                stds[c] > 0.0 ? (d.values(r, c) - means[c]) / stds[c] : 0.0;
        }
    }
    return out;
}

double Scaler::invert(int feature, double scaled) const {
    return stds[feature] > 0.0 ? scaled * stds[feature] + means[feature] : means[feature];
}

Dataset standardize(const Dataset& d) { return Scaler::fit(d).apply(d); }

std::vector<int> FoldPlan::fold_rows(int fold) const {
    std::vector<int> rows;
    for (size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) rows.push_back(static_cast<int>(i));
    return rows;
}

std::vector<int> FoldPlan::complement_rows(int fold) const {
    std::vector<int> rows;
    for (size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) rows.push_back(static_cast<int>(i));
    return rows;
}

FoldPlan split_folds(const Dataset& d, int k, uint64_t seed) {
    int n = d.n_points();
    if (k < 2 || k > n)
        throw std::invalid_argument("fold count " + std::to_string(k) +
                                    " out of range [2, " + std::to_string(n) + "]");
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(n, 0);
    for (int i = 0; i < n; ++i) plan.assignments[order[i]] = i % k;
    return plan;
}

}  // namespace segmenter
