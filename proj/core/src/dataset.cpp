#include "gcml/dataset.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <unordered_map>

#include "gcml/csv.hpp"
#include "gcml/errors.hpp"

namespace gcml {

namespace {

bool is_zero_one(double v) { return v == 0.0 || v == 1.0; }

} // namespace

void TrialDataset::validate() const {
    const Eigen::Index rows = y.size();
    if (rows < 2) throw DataError("dataset needs at least 2 rows, got " + std::to_string(rows));
    if (a.size() != rows || x.rows() != rows)
        throw DataError("y, a and x row counts disagree");
    if (static_cast<Eigen::Index>(column_kinds.size()) != x.cols() ||
        static_cast<Eigen::Index>(column_names.size()) != x.cols())
        throw DataError("column metadata does not match covariate count");

    for (Eigen::Index i = 0; i < rows; ++i) {
        if (!is_zero_one(y[i])) throw DataError("outcome y must be 0/1, row " + std::to_string(i));
        if (!is_zero_one(a[i])) throw DataError("arm a must be 0/1, row " + std::to_string(i));
    }
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            double v = x(i, j);
            if (!std::isfinite(v))
                throw DataError("non-finite covariate value in column " + column_names[j]);
            if (column_kinds[j] == ColumnKind::binary && !is_zero_one(v))
                throw DataError("column " + column_names[j] + " tagged binary but holds " +
                                std::to_string(v));
        }
    }
}

TrialDataset load_dataset(const std::filesystem::path& csv_path,
                          const std::optional<std::filesystem::path>& schema_path) {
    CsvTable table = read_csv(csv_path);

    int y_col = table.column("y");
    int a_col = table.column("a");
    if (y_col < 0) throw DataError(csv_path.string() + ": missing required column 'y'");
    if (a_col < 0) throw DataError(csv_path.string() + ": missing required column 'a'");

    std::unordered_map<std::string, ColumnKind> overrides;
    if (schema_path) {
        std::ifstream in(*schema_path);
        if (!in) throw DataError("cannot open schema " + schema_path->string());
        nlohmann::json schema;
        try {
            in >> schema;
        } catch (const nlohmann::json::exception& e) {
            throw DataError("schema " + schema_path->string() + ": " + e.what());
        }
        if (!schema.is_object()) throw DataError("schema must be a JSON object of name -> kind");
        for (auto& [name, kind] : schema.items()) {
            if (!kind.is_string())
                throw DataError("schema entry for '" + name + "' must be a string");
            std::string k = kind.get<std::string>();
            if (k == "binary")
                overrides[name] = ColumnKind::binary;
            else if (k == "continuous")
                overrides[name] = ColumnKind::continuous;
            else
                throw DataError("schema kind for '" + name + "' must be binary or continuous, got '" +
                                k + "'");
        }
    }

    TrialDataset data;
    const Eigen::Index n = static_cast<Eigen::Index>(table.rows.size());
    std::vector<int> cov_cols;
    for (int j = 0; j < static_cast<int>(table.header.size()); ++j) {
        if (j == y_col || j == a_col) continue;
        cov_cols.push_back(j);
        data.column_names.push_back(table.header[j]);
    }
    for (const auto& [name, kind] : overrides) {
        (void)kind;
        bool known = std::find(data.column_names.begin(), data.column_names.end(), name) !=
                     data.column_names.end();
        if (!known) throw DataError("schema names unknown column '" + name + "'");
    }

    data.y.resize(n);
    data.a.resize(n);
    data.x.resize(n, static_cast<Eigen::Index>(cov_cols.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        data.y[i] = parse_double(row[static_cast<std::size_t>(y_col)]);
        data.a[i] = parse_double(row[static_cast<std::size_t>(a_col)]);
        for (std::size_t k = 0; k < cov_cols.size(); ++k)
            data.x(i, static_cast<Eigen::Index>(k)) =
                parse_double(row[static_cast<std::size_t>(cov_cols[k])]);
    }

    for (std::size_t k = 0; k < cov_cols.size(); ++k) {
        const std::string& name = data.column_names[k];
        auto it = overrides.find(name);
        if (it != overrides.end()) {
            data.column_kinds.push_back(it->second);
            continue;
        }
        bool all_01 = true;
        for (Eigen::Index i = 0; i < n && all_01; ++i)
            all_01 = is_zero_one(data.x(i, static_cast<Eigen::Index>(k)));
        data.column_kinds.push_back(all_01 ? ColumnKind::binary : ColumnKind::continuous);
    }

    data.validate();
    return data;
}

void save_dataset(const TrialDataset& data, const std::filesystem::path& csv_path) {
    std::vector<std::string> header{"y", "a"};
    header.insert(header.end(), data.column_names.begin(), data.column_names.end());
    CsvWriter writer(csv_path, header);
    std::vector<std::string> cells(header.size());
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        cells[0] = format_double(data.y[i]);
        cells[1] = format_double(data.a[i]);
        for (Eigen::Index j = 0; j < data.p(); ++j)
            cells[static_cast<std::size_t>(2 + j)] = format_double(data.x(i, j));
        writer.write_row(cells);
    }
}

} // namespace gcml
