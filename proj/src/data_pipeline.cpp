#include "qfd/data_pipeline.hpp"

#include "qfd/error.hpp"
#include "qfd/gram_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace qfd {

namespace {

std::string unquote(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) {
        s.pop_back();
    }
    std::size_t start = 0;
    while (start < s.size() && s[start] == ' ') {
        ++start;
    }
    s.erase(0, start);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string> split_cells(const std::string &line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
            cur.push_back(ch);
        } else if (ch == ',' && !quoted) {
            cells.push_back(unquote(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cells.push_back(unquote(cur));
    return cells;
}

bool parse_number(const std::string &cell, double &out) {
    const char *first = cell.data();
    const char *last = cell.data() + cell.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last && std::isfinite(out);
}

std::vector<double> to_vector(const Eigen::VectorXd &v) {
    return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd from_vector(const std::vector<double> &v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void append_record(Dataset &d, std::string op, nlohmann::json params) {
    d.provenance.push_back(TransformRecord{std::move(op), std::move(params)});
}

}  // namespace

bool Dataset::has_transform(const std::string &op) const {
    return std::any_of(provenance.begin(), provenance.end(), [&op](const TransformRecord &r) { return r.op == op; });
}

const std::vector<int> &Dataset::require_labels() const {
    if (!labels) {
        throw ValueError("dataset has no labels");
    }
    return *labels;
}

void Dataset::validate() const {
    if (!features.allFinite()) {
        throw ValueError("dataset contains non-finite values");
    }
    if (labels && static_cast<Eigen::Index>(labels->size()) != features.rows()) {
        throw DimensionError("label count does not match row count");
    }
    if (static_cast<Eigen::Index>(feature_names.size()) != features.cols()) {
        throw DimensionError("feature name count does not match column count");
    }
    if (static_cast<Eigen::Index>(row_ids.size()) != features.rows()) {
        throw DimensionError("row id count does not match row count");
    }
}

Dataset load_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError(path.string() + ": missing header row");
    }
    const std::vector<std::string> header = split_cells(line);
    std::unordered_map<std::string, std::size_t> column;
    for (std::size_t c = 0; c < header.size(); ++c) {
        column.emplace(header[c], c);
    }

    Dataset d;
    std::vector<std::size_t> feature_cols;
    for (int k = 1; k <= kAnonymizedFeatures; ++k) {
        const std::string name = "V" + std::to_string(k);
        const auto it = column.find(name);
        if (it == column.end()) {
            throw SchemaError(path.string() + ": missing column \"" + name + "\"");
        }
        feature_cols.push_back(it->second);
        d.feature_names.push_back(name);
    }
    const auto class_it = column.find("Class");
    const bool labeled = class_it != column.end();

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const std::vector<std::string> cells = split_cells(line);
        if (cells.size() != header.size()) {
            throw SchemaError(path.string() + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) + " cells, header has " + std::to_string(header.size()));
        }
        for (std::size_t k = 0; k < feature_cols.size(); ++k) {
            double v = 0.0;
            if (!parse_number(cells[feature_cols[k]], v)) {
                throw SchemaError(path.string() + ": line " + std::to_string(line_no) + ": cannot parse " + d.feature_names[k] + " value '" + cells[feature_cols[k]] + "'");
            }
            values.push_back(v);
        }
        if (labeled) {
            const std::string &cell = cells[class_it->second];
            if (cell != "0" && cell != "1") {
                throw SchemaError(path.string() + ": line " + std::to_string(line_no) + ": Class must be 0 or 1, got '" + cell + "'");
            }
            labels.push_back(cell == "1" ? 1 : 0);
        }
        d.row_ids.push_back(std::to_string(d.row_ids.size()));
    }

    const auto n = static_cast<Eigen::Index>(d.row_ids.size());
    d.features = Eigen::Map<const RowMatrix>(values.data(), n, kAnonymizedFeatures);
    if (labeled) {
        d.labels = std::move(labels);
    }
    append_record(d, "load_csv", {{"path", path.string()}, {"rows", n}, {"dropped", {"Time", "Amount"}}});
    return d;
}

Dataset select_rows(const Dataset &d, std::span<const std::size_t> indices) {
    Dataset out;
    out.feature_names = d.feature_names;
    out.provenance = d.provenance;
    out.features.resize(static_cast<Eigen::Index>(indices.size()), d.cols());
    if (d.labels) {
        out.labels.emplace();
    }
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const std::size_t src = indices[r];
        if (src >= static_cast<std::size_t>(d.rows())) {
            throw IndexError("row index " + std::to_string(src) + " out of range for " + std::to_string(d.rows()) + " rows");
        }
        out.features.row(static_cast<Eigen::Index>(r)) = d.features.row(static_cast<Eigen::Index>(src));
        out.row_ids.push_back(d.row_ids[src]);
        if (d.labels) {
            out.labels->push_back((*d.labels)[src]);
        }
    }
    return out;
}

Dataset subsample(const Dataset &d, std::size_t n_nominal, std::size_t n_fraud, std::uint64_t seed) {
    const std::vector<int> &labels = d.require_labels();
    std::vector<std::size_t> nominal;
    std::vector<std::size_t> fraud;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] == 1 ? fraud : nominal).push_back(i);
    }
    if (nominal.size() < n_nominal) {
        throw ValueError("requested " + std::to_string(n_nominal) + " nominal rows, only " + std::to_string(nominal.size()) + " available");
    }
    if (fraud.size() < n_fraud) {
        throw ValueError("requested " + std::to_string(n_fraud) + " fraud rows, only " + std::to_string(fraud.size()) + " available");
    }
    std::mt19937_64 rng(seed);
    std::shuffle(nominal.begin(), nominal.end(), rng);
    std::shuffle(fraud.begin(), fraud.end(), rng);
    std::vector<std::size_t> chosen(nominal.begin(), nominal.begin() + static_cast<std::ptrdiff_t>(n_nominal));
    chosen.insert(chosen.end(), fraud.begin(), fraud.begin() + static_cast<std::ptrdiff_t>(n_fraud));
    std::sort(chosen.begin(), chosen.end());

    Dataset out = select_rows(d, chosen);
    append_record(out, "subsample", {{"n_nominal", n_nominal}, {"n_fraud", n_fraud}, {"seed", seed}});
    return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ValueError("test fraction must lie in (0, 1)");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (int cls : {0, 1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) {
                idx.push_back(i);
            }
        }
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(idx.size())));
        test.insert(test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
        train.insert(train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {std::move(train), std::move(test)};
}

ScalerParams fit_scaler(const Dataset &d) {
    if (d.rows() < 2) {
        throw ValueError("scaler needs at least 2 rows");
    }
    ScalerParams p;
    p.means = d.features.colwise().mean().transpose();
    p.stds.resize(d.cols());
    for (Eigen::Index c = 0; c < d.cols(); ++c) {
        const double var = (d.features.col(c).array() - p.means(c)).square().mean();
        p.stds(c) = std::sqrt(var);
        if (!(p.stds(c) > 0.0)) {
            const std::string name = c < static_cast<Eigen::Index>(d.feature_names.size()) ? d.feature_names[static_cast<std::size_t>(c)] : std::to_string(c);
            throw ValueError("feature " + name + " is constant; cannot standard-scale");
        }
    }
    return p;
}

Dataset apply_scaler(const Dataset &d, const ScalerParams &p) {
    if (p.means.size() != d.cols() || p.stds.size() != d.cols()) {
        throw DimensionError("scaler fitted on " + std::to_string(p.means.size()) + " features, dataset has " + std::to_string(d.cols()));
    }
    Dataset out = d;
    out.features = ((d.features.rowwise() - p.means.transpose()).array().rowwise() / p.stds.transpose().array()).matrix();
    append_record(out, "standard_scale", {{"means", to_vector(p.means)}, {"stds", to_vector(p.stds)}});
    return out;
}

PcaParams fit_pca(const Dataset &d, int n_components) {
    if (!d.has_transform("standard_scale")) {
        throw ValueError("PCA requires standard-scaled input; apply the scaler first");
    }
    const Eigen::Index f = d.cols();
    const Eigen::Index n = d.rows();
    const Eigen::Index max_rank = std::min(f, n - 1);
    if (n_components < 1 || n_components > max_rank) {
        throw ValueError("n_components=" + std::to_string(n_components) + " outside [1, " + std::to_string(max_rank) + "] for " + std::to_string(n) + "x" + std::to_string(f) + " data");
    }

    PcaParams p;
    p.mean = d.features.colwise().mean().transpose();
    const Eigen::MatrixXd centered = d.features.rowwise() - p.mean.transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw ConvergenceError("covariance eigendecomposition failed");
    }
    // Eigen returns ascending order.
    p.spectrum = eig.eigenvalues().reverse().cwiseMax(0.0);
    const double tol = std::max(1.0, p.spectrum(0)) * 1e-10 * static_cast<double>(f);
    const auto rank = static_cast<int>((p.spectrum.array() > tol).count());
    if (n_components > rank) {
        throw ValueError("data has numerical rank " + std::to_string(rank) + "; cannot keep " + std::to_string(n_components) + " principal components (achievable: at most " + std::to_string(rank) + ")");
    }
    p.components.resize(f, n_components);
    for (int k = 0; k < n_components; ++k) {
        Eigen::VectorXd v = eig.eigenvectors().col(f - 1 - k);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) {
            v = -v;
        }
        p.components.col(k) = v;
    }
    p.explained_variance = p.spectrum.head(n_components);
    return p;
}

Dataset apply_pca(const Dataset &d, const PcaParams &p) {
    if (p.components.rows() != d.cols()) {
        throw DimensionError("PCA fitted on " + std::to_string(p.components.rows()) + " features, dataset has " + std::to_string(d.cols()));
    }
    Dataset out = d;
    out.features = (d.features.rowwise() - p.mean.transpose()) * p.components;
    out.feature_names.clear();
    for (Eigen::Index k = 0; k < p.components.cols(); ++k) {
        out.feature_names.push_back("PC" + std::to_string(k + 1));
    }
    std::vector<std::vector<double>> comps;
    for (Eigen::Index k = 0; k < p.components.cols(); ++k) {
        comps.push_back(to_vector(p.components.col(k)));
    }
    append_record(out, "pca", {{"n_components", p.components.cols()}, {"mean", to_vector(p.mean)}, {"components", comps}, {"explained_variance", to_vector(p.explained_variance)}});
    return out;
}

Dataset apply_eta(const Dataset &d, double eta) {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw ValueError("eta must be positive and finite");
    }
    Dataset out = d;
    out.features *= eta;
    append_record(out, "eta", {{"eta", eta}});
    return out;
}

Dataset replay_transforms(const Dataset &d, std::span<const TransformRecord> records) {
    Dataset out = d;
    for (const TransformRecord &r : records) {
        if (r.op == "standard_scale") {
            out = apply_scaler(out, ScalerParams{from_vector(r.params.at("means").get<std::vector<double>>()), from_vector(r.params.at("stds").get<std::vector<double>>())});
        } else if (r.op == "pca") {
            const auto comps = r.params.at("components").get<std::vector<std::vector<double>>>();
            PcaParams p;
            p.mean = from_vector(r.params.at("mean").get<std::vector<double>>());
            p.explained_variance = from_vector(r.params.at("explained_variance").get<std::vector<double>>());
            p.components.resize(p.mean.size(), static_cast<Eigen::Index>(comps.size()));
            for (std::size_t k = 0; k < comps.size(); ++k) {
                p.components.col(static_cast<Eigen::Index>(k)) = from_vector(comps[k]);
            }
            out = apply_pca(out, p);
        } else if (r.op == "eta") {
            out = apply_eta(out, r.params.at("eta").get<double>());
        }
    }
    return out;
}

void write_dataset_csv(const std::filesystem::path &path, const Dataset &d) {
    d.validate();
    std::ofstream out(path);
    if (!out) {
        throw SchemaError("cannot open " + path.string() + " for writing");
    }
    out << "row_id";
    for (const std::string &name : d.feature_names) {
        out << ',' << name;
    }
    if (d.labels) {
        out << ",Class";
    }
    out << '\n';
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        out << d.row_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index c = 0; c < d.cols(); ++c) {
            out << ',' << format_double(d.features(i, c));
        }
        if (d.labels) {
            out << ',' << (*d.labels)[static_cast<std::size_t>(i)];
        }
        out << '\n';
    }

    nlohmann::json prov = nlohmann::json::array();
    for (const TransformRecord &r : d.provenance) {
        prov.push_back({{"op", r.op}, {"params", r.params}});
    }
    std::ofstream side(path.string() + ".provenance.json");
    side << prov.dump(2) << '\n';
}

Dataset read_dataset_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError(path.string() + ": missing header row");
    }
    std::vector<std::string> header = split_cells(line);
    if (header.empty() || header.front() != "row_id") {
        throw SchemaError(path.string() + ": header must start with row_id");
    }
    const bool labeled = header.back() == "Class";
    Dataset d;
    d.feature_names.assign(header.begin() + 1, header.end() - (labeled ? 1 : 0));
    const std::size_t f = d.feature_names.size();
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> cells = split_cells(line);
        if (cells.size() != header.size()) {
            throw SchemaError(path.string() + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) + " cells");
        }
        d.row_ids.push_back(cells[0]);
        for (std::size_t k = 0; k < f; ++k) {
            double v = 0.0;
            if (!parse_number(cells[k + 1], v)) {
                throw SchemaError(path.string() + ": line " + std::to_string(line_no) + ": cannot parse '" + cells[k + 1] + "'");
            }
            values.push_back(v);
        }
        if (labeled) {
            labels.push_back(cells.back() == "1" ? 1 : 0);
        }
    }
    d.features = Eigen::Map<const RowMatrix>(values.data(), static_cast<Eigen::Index>(d.row_ids.size()), static_cast<Eigen::Index>(f));
    if (labeled) {
        d.labels = std::move(labels);
    }
    std::ifstream side(path.string() + ".provenance.json");
    if (side) {
        for (const auto &r : nlohmann::json::parse(side)) {
            d.provenance.push_back(TransformRecord{r.at("op").get<std::string>(), r.at("params")});
        }
    }
    return d;
}

}  // namespace qfd
