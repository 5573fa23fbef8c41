#include "qfd/models.hpp"

#include "qfd/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

namespace qfd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTau = 1e-12;

// min 0.5 a'Qa + p'a  s.t.  y'a = const, 0 <= a_i <= upper, with Q_ij = y_i y_j K_ij.
struct DualProblem {
    const RowMatrix &gram;
    std::vector<int> y;
    std::vector<double> p;
    double upper;
    double jitter;

    [[nodiscard]] double q(std::size_t i, std::size_t j) const {
        const double k = gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) + (i == j ? jitter : 0.0);
        return y[i] * y[j] * k;
    }
    [[nodiscard]] std::size_t size() const { return y.size(); }
};

struct DualSolution {
    std::vector<double> alpha;
    double rho = 0.0;
    double violation = 0.0;
    long iterations = 0;
};

std::vector<double> gradient(const DualProblem &prob, const std::vector<double> &alpha) {
    const std::size_t n = prob.size();
    std::vector<double> g(prob.p);
    for (std::size_t j = 0; j < n; ++j) {
        if (alpha[j] == 0.0) {
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            g[i] += prob.q(i, j) * alpha[j];
        }
    }
    return g;
}

bool below_upper(const DualProblem &prob, double a) { return a < prob.upper; }
bool above_lower(double a) { return a > 0.0; }

// m(alpha) - M(alpha): zero exactly at a KKT point.
double violation_gap(const DualProblem &prob, const std::vector<double> &alpha, const std::vector<double> &g) {
    double up = -kInf;
    double low = -kInf;
    for (std::size_t t = 0; t < prob.size(); ++t) {
        const double yg = -prob.y[t] * g[t];
        const bool in_up = prob.y[t] == 1 ? below_upper(prob, alpha[t]) : above_lower(alpha[t]);
        const bool in_low = prob.y[t] == 1 ? above_lower(alpha[t]) : below_upper(prob, alpha[t]);
        if (in_up) {
            up = std::max(up, yg);
        }
        if (in_low) {
            low = std::max(low, -yg);
        }
    }
    if (up == -kInf || low == -kInf) {
        return 0.0;
    }
    return std::max(0.0, up + low);
}

// Average of y_i G_i over free variables; otherwise the midpoint of the feasible interval.
double offset(const DualProblem &prob, const std::vector<double> &alpha, const std::vector<double> &g) {
    double ub = kInf;
    double lb = -kInf;
    double sum_free = 0.0;
    int n_free = 0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        const double yg = prob.y[i] * g[i];
        if (alpha[i] >= prob.upper) {
            if (prob.y[i] == -1) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else if (alpha[i] <= 0.0) {
            if (prob.y[i] == 1) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    if (n_free > 0) {
        return sum_free / n_free;
    }
    if (std::isinf(ub) && std::isinf(lb)) {
        return 0.0;
    }
    if (std::isinf(ub)) {
        return lb;
    }
    if (std::isinf(lb)) {
        return ub;
    }
    return 0.5 * (ub + lb);
}

// SMO with second-order working-set selection.
DualSolution solve_dual(const DualProblem &prob, std::vector<double> alpha, const SolverOptions &options) {
    const std::size_t n = prob.size();
    std::vector<double> g = gradient(prob, alpha);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = prob.q(i, i);
    }
    const double C = prob.upper;

    long iter = 0;
    for (;; ++iter) {
        if (iter >= options.max_iterations) {
            throw ConvergenceError("SMO did not reach KKT tolerance " + std::to_string(options.tolerance) + " within " + std::to_string(options.max_iterations) + " iterations");
        }
        // i: maximal violator in the "up" set
        double gmax = -kInf;
        std::ptrdiff_t i_sel = -1;
        for (std::size_t t = 0; t < n; ++t) {
            if (prob.y[t] == 1) {
                if (alpha[t] < C && -g[t] >= gmax) {
                    gmax = -g[t];
                    i_sel = static_cast<std::ptrdiff_t>(t);
                }
            } else if (alpha[t] > 0.0 && g[t] >= gmax) {
                gmax = g[t];
                i_sel = static_cast<std::ptrdiff_t>(t);
            }
        }
        double gmax2 = -kInf;
        std::ptrdiff_t j_sel = -1;
        double best_obj = kInf;
        if (i_sel >= 0) {
            const auto i = static_cast<std::size_t>(i_sel);
            for (std::size_t t = 0; t < n; ++t) {
                double grad_diff = 0.0;
                if (prob.y[t] == 1) {
                    if (!(alpha[t] > 0.0)) {
                        continue;
                    }
                    gmax2 = std::max(gmax2, g[t]);
                    grad_diff = gmax + g[t];
                } else {
                    if (!(alpha[t] < C)) {
                        continue;
                    }
                    gmax2 = std::max(gmax2, -g[t]);
                    grad_diff = gmax - g[t];
                }
                if (grad_diff > 0.0) {
                    double quad = diag[i] + diag[t] - 2.0 * prob.y[i] * prob.y[t] * prob.q(i, t);
                    if (quad <= 0.0) {
                        quad = kTau;
                    }
                    const double obj = -(grad_diff * grad_diff) / quad;
                    if (obj <= best_obj) {
                        best_obj = obj;
                        j_sel = static_cast<std::ptrdiff_t>(t);
                    }
                }
            }
        }
        if (i_sel < 0 || j_sel < 0 || gmax + gmax2 < options.tolerance) {
            break;
        }

        const auto i = static_cast<std::size_t>(i_sel);
        const auto j = static_cast<std::size_t>(j_sel);
        const double old_ai = alpha[i];
        const double old_aj = alpha[j];
        const double qij = prob.q(i, j);
        double &ai = alpha[i];
        double &aj = alpha[j];
        if (prob.y[i] != prob.y[j]) {
            double quad = diag[i] + diag[j] + 2.0 * qij;
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double delta = (-g[i] - g[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = diff;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = -diff;
            }
            if (diff > 0.0) {
                if (ai > C) {
                    ai = C;
                    aj = C - diff;
                }
            } else if (aj > C) {
                aj = C;
                ai = C + diff;
            }
        } else {
            double quad = diag[i] + diag[j] - 2.0 * qij;
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double delta = (g[i] - g[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > C) {
                if (ai > C) {
                    ai = C;
                    aj = sum - C;
                }
            } else if (aj < 0.0) {
                aj = 0.0;
                ai = sum;
            }
            if (sum > C) {
                if (aj > C) {
                    aj = C;
                    ai = sum - C;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = sum;
            }
        }
        const double dai = ai - old_ai;
        const double daj = aj - old_aj;
        for (std::size_t t = 0; t < n; ++t) {
            g[t] += prob.q(t, i) * dai + prob.q(t, j) * daj;
        }
    }

    DualSolution sol;
    sol.rho = offset(prob, alpha, g);
    sol.violation = violation_gap(prob, alpha, g);
    sol.iterations = iter;
    sol.alpha = std::move(alpha);
    return sol;
}

void check_square(const RowMatrix &gram) {
    if (gram.rows() != gram.cols()) {
        throw DimensionError("gram matrix is " + std::to_string(gram.rows()) + "x" + std::to_string(gram.cols()) + ", expected square");
    }
    if (gram.rows() == 0) {
        throw DimensionError("gram matrix is empty");
    }
}

std::vector<std::size_t> support_of(const std::vector<double> &alpha) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] > 0.0) {
            idx.push_back(i);
        }
    }
    return idx;
}

DualProblem svc_problem(const RowMatrix &gram, const SvcModel &model, double jitter) {
    return DualProblem{gram, model.y, std::vector<double>(model.y.size(), -1.0), model.C, jitter};
}

// Solved in the libsvm scaling 0 <= a_i <= 1, sum a = nu N, so the stopping
// tolerance means the same thing for every N and nu; alpha = a / (nu N).
DualProblem ocsvm_problem(const RowMatrix &gram, std::size_t n, double jitter) {
    return DualProblem{gram, std::vector<int>(n, 1), std::vector<double>(n, 0.0), 1.0, jitter};
}

double ocsvm_scale(const OcSvmModel &model) { return model.nu * static_cast<double>(model.alpha.size()); }

double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// log(1 + exp(-m)) without overflow.
double log1p_exp_neg(double m) {
    return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

void check_logreg_inputs(const RowMatrix &features, std::span<const int> y) {
    if (static_cast<Eigen::Index>(y.size()) != features.rows()) {
        throw DimensionError("got " + std::to_string(y.size()) + " labels for " + std::to_string(features.rows()) + " rows");
    }
    if (!features.allFinite()) {
        throw ValueError("logistic regression input contains non-finite values");
    }
    bool pos = false;
    bool neg = false;
    for (int v : y) {
        if (v != 0 && v != 1) {
            throw ValueError("logistic regression labels must be 0 or 1");
        }
        (v == 1 ? pos : neg) = true;
    }
    if (!pos || !neg) {
        throw ValueError("logistic regression needs both classes present");
    }
}

// Gradient of the objective w.r.t. (w, b), stacked.
Eigen::VectorXd logreg_gradient(const Eigen::VectorXd &theta, const RowMatrix &x, std::span<const int> y, double C) {
    const Eigen::Index f = x.cols();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(f + 1);
    g.head(f) = theta.head(f);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double t = 2.0 * y[static_cast<std::size_t>(i)] - 1.0;
        const double z = x.row(i).dot(theta.head(f)) + theta(f);
        const double coef = -C * t * sigmoid(-t * z);
        g.head(f) += coef * x.row(i).transpose();
        g(f) += coef;
    }
    return g;
}

double logreg_objective_raw(const Eigen::VectorXd &theta, const RowMatrix &x, std::span<const int> y, double C) {
    const Eigen::Index f = x.cols();
    double obj = 0.5 * theta.head(f).squaredNorm();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double t = 2.0 * y[static_cast<std::size_t>(i)] - 1.0;
        obj += C * log1p_exp_neg(t * (x.row(i).dot(theta.head(f)) + theta(f)));
    }
    return obj;
}

Eigen::VectorXd pack(const LogRegModel &m) {
    Eigen::VectorXd theta(m.weights.size() + 1);
    theta.head(m.weights.size()) = m.weights;
    theta(m.weights.size()) = m.bias;
    return theta;
}

}  // namespace

SvcModel train_svc(const RowMatrix &gram, std::span<const int> y, double C, const SolverOptions &options) {
    check_square(gram);
    if (static_cast<Eigen::Index>(y.size()) != gram.rows()) {
        throw DimensionError("got " + std::to_string(y.size()) + " labels for a " + std::to_string(gram.rows()) + "-row gram matrix");
    }
    if (!(C > 0.0) || !std::isfinite(C)) {
        throw ValueError("C must be positive and finite");
    }
    bool pos = false;
    bool neg = false;
    for (int v : y) {
        if (v != 1 && v != -1) {
            throw ValueError("SVC labels must be +1 or -1");
        }
        (v == 1 ? pos : neg) = true;
    }
    if (!pos || !neg) {
        throw ValueError("SVC training needs both classes present");
    }

    SvcModel model;
    model.y.assign(y.begin(), y.end());
    model.C = C;
    const DualProblem prob = svc_problem(gram, model, options.diagonal_jitter);
    DualSolution sol = solve_dual(prob, std::vector<double>(y.size(), 0.0), options);
    model.alpha = std::move(sol.alpha);
    model.bias = -sol.rho;
    model.support = support_of(model.alpha);
    model.kkt_violation = sol.violation;
    model.iterations = sol.iterations;
    return model;
}

OcSvmModel train_ocsvm(const RowMatrix &gram, double nu, const SolverOptions &options) {
    check_square(gram);
    if (!(nu > 0.0 && nu <= 1.0)) {
        throw ValueError("nu must lie in (0, 1], got " + std::to_string(nu));
    }
    const auto n = static_cast<std::size_t>(gram.rows());

    OcSvmModel model;
    model.nu = nu;
    model.alpha.assign(n, 0.0);
    const double scale = ocsvm_scale(model);
    // feasible start: the first floor(nu N) variables at the bound, the remainder on the next
    std::vector<double> a(n, 0.0);
    const auto n_full = std::min(n, static_cast<std::size_t>(std::floor(scale + 1e-9)));
    std::fill(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n_full), 1.0);
    if (n_full < n) {
        a[n_full] = std::max(0.0, scale - static_cast<double>(n_full));
    }

    const DualProblem prob = ocsvm_problem(gram, n, options.diagonal_jitter);
    DualSolution sol = solve_dual(prob, std::move(a), options);
    for (std::size_t i = 0; i < n; ++i) {
        model.alpha[i] = sol.alpha[i] / scale;
    }
    model.rho = sol.rho / scale;
    model.support = support_of(model.alpha);
    model.kkt_violation = sol.violation;
    model.iterations = sol.iterations;
    return model;
}

double decision(const SvcModel &model, std::span<const double> k_row) {
    if (k_row.size() != model.alpha.size()) {
        throw DimensionError("kernel row has " + std::to_string(k_row.size()) + " entries, model has " + std::to_string(model.alpha.size()) + " training rows");
    }
    double f = model.bias;
    for (std::size_t i : model.support) {
        f += model.alpha[i] * model.y[i] * k_row[i];
    }
    return f;
}

double decision(const OcSvmModel &model, std::span<const double> k_row) {
    if (k_row.size() != model.alpha.size()) {
        throw DimensionError("kernel row has " + std::to_string(k_row.size()) + " entries, model has " + std::to_string(model.alpha.size()) + " training rows");
    }
    double f = -model.rho;
    for (std::size_t i : model.support) {
        f += model.alpha[i] * k_row[i];
    }
    return f;
}

double anomaly_score(const OcSvmModel &model, std::span<const double> k_row) {
    return -decision(model, k_row);
}

double kkt_violation(const SvcModel &model, const RowMatrix &gram) {
    check_square(gram);
    const DualProblem prob = svc_problem(gram, model, 0.0);
    return violation_gap(prob, model.alpha, gradient(prob, model.alpha));
}

double kkt_violation(const OcSvmModel &model, const RowMatrix &gram) {
    check_square(gram);
    const DualProblem prob = ocsvm_problem(gram, model.alpha.size(), 0.0);
    std::vector<double> a(model.alpha);
    const double scale = ocsvm_scale(model);
    for (double &v : a) {
        // snap values that rescaling pushed a rounding error away from the box
        v = std::clamp(v * scale, 0.0, 1.0);
        if (1.0 - v < 1e-12) {
            v = 1.0;
        }
    }
    return violation_gap(prob, a, gradient(prob, a));
}

LogRegModel train_logreg(const RowMatrix &features, std::span<const int> y, double C) {
    check_logreg_inputs(features, y);
    if (!(C > 0.0) || !std::isfinite(C)) {
        throw ValueError("C must be positive and finite");
    }
    const Eigen::Index f = features.cols();
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(f + 1);
    double obj = logreg_objective_raw(theta, features, y, C);
    const double g0 = std::max(1.0, logreg_gradient(theta, features, y, C).lpNorm<Eigen::Infinity>());

    // Damped Newton with Armijo backtracking.
    for (int iter = 0; iter < 200; ++iter) {
        const Eigen::VectorXd g = logreg_gradient(theta, features, y, C);
        if (g.lpNorm<Eigen::Infinity>() <= 1e-10 * g0) {
            break;
        }
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(f + 1, f + 1);
        hess.topLeftCorner(f, f).setIdentity();
        Eigen::VectorXd xi(f + 1);
        for (Eigen::Index i = 0; i < features.rows(); ++i) {
            xi.head(f) = features.row(i).transpose();
            xi(f) = 1.0;
            const double z = xi.dot(theta);
            const double s = sigmoid(z);
            hess.noalias() += C * s * (1.0 - s) * xi * xi.transpose();
        }
        hess.diagonal().array() += 1e-12;
        const Eigen::VectorXd step = hess.ldlt().solve(-g);
        double t = 1.0;
        const double slope = g.dot(step);
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            const Eigen::VectorXd cand = theta + t * step;
            const double cand_obj = logreg_objective_raw(cand, features, y, C);
            if (cand_obj <= obj + 1e-4 * t * slope) {
                theta = cand;
                obj = cand_obj;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            break;
        }
    }

    LogRegModel model;
    model.weights = theta.head(f);
    model.bias = theta(f);
    model.C = C;
    return model;
}

double logreg_objective(const LogRegModel &model, const RowMatrix &features, std::span<const int> y) {
    return logreg_objective_raw(pack(model), features, y, model.C);
}

double logreg_gradient_norm(const LogRegModel &model, const RowMatrix &features, std::span<const int> y) {
    return logreg_gradient(pack(model), features, y, model.C).norm();
}

std::vector<double> predict_scores(const SvcModel &model, const RowMatrix &k_cross) {
    std::vector<double> scores(static_cast<std::size_t>(k_cross.rows()));
    if (k_cross.rows() > 0 && k_cross.cols() != static_cast<Eigen::Index>(model.alpha.size())) {
        throw DimensionError("kernel matrix has " + std::to_string(k_cross.cols()) + " columns, model has " + std::to_string(model.alpha.size()) + " training rows");
    }
    for (Eigen::Index r = 0; r < k_cross.rows(); ++r) {
        scores[static_cast<std::size_t>(r)] = decision(model, row_span(k_cross, r));
    }
    return scores;
}

std::vector<double> predict_scores(const OcSvmModel &model, const RowMatrix &k_cross) {
    std::vector<double> scores(static_cast<std::size_t>(k_cross.rows()));
    if (k_cross.rows() > 0 && k_cross.cols() != static_cast<Eigen::Index>(model.alpha.size())) {
        throw DimensionError("kernel matrix has " + std::to_string(k_cross.cols()) + " columns, model has " + std::to_string(model.alpha.size()) + " training rows");
    }
    for (Eigen::Index r = 0; r < k_cross.rows(); ++r) {
        scores[static_cast<std::size_t>(r)] = anomaly_score(model, row_span(k_cross, r));
    }
    return scores;
}

std::vector<double> predict_scores(const LogRegModel &model, const RowMatrix &features) {
    std::vector<double> scores(static_cast<std::size_t>(features.rows()));
    if (features.rows() > 0 && features.cols() != model.weights.size()) {
        throw DimensionError("feature matrix has " + std::to_string(features.cols()) + " columns, model expects " + std::to_string(model.weights.size()));
    }
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
        scores[static_cast<std::size_t>(r)] = sigmoid(features.row(r).dot(model.weights) + model.bias);
    }
    return scores;
}

void to_json(nlohmann::json &j, const ModelRecord &record) {
    j = nlohmann::json::object();
    std::visit(
        [&j](const auto &m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, SvcModel>) {
                j["type"] = "svc";
                j["alpha"] = m.alpha;
                j["y"] = m.y;
                j["bias"] = m.bias;
                j["C"] = m.C;
                j["support"] = m.support;
            } else if constexpr (std::is_same_v<M, OcSvmModel>) {
                j["type"] = "ocsvm";
                j["alpha"] = m.alpha;
                j["rho"] = m.rho;
                j["nu"] = m.nu;
                j["support"] = m.support;
            } else {
                j["type"] = "logreg";
                j["weights"] = std::vector<double>(m.weights.data(), m.weights.data() + m.weights.size());
                j["bias"] = m.bias;
                j["C"] = m.C;
            }
        },
        record.model);
    j["kernel"] = record.kernel ? nlohmann::json(*record.kernel) : nlohmann::json(nullptr);
    j["training_ids"] = record.training_ids;
}

void from_json(const nlohmann::json &j, ModelRecord &record) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "svc") {
        SvcModel m;
        m.alpha = j.at("alpha").get<std::vector<double>>();
        m.y = j.at("y").get<std::vector<int>>();
        m.bias = j.at("bias").get<double>();
        m.C = j.at("C").get<double>();
        m.support = j.at("support").get<std::vector<std::size_t>>();
        record.model = std::move(m);
    } else if (type == "ocsvm") {
        OcSvmModel m;
        m.alpha = j.at("alpha").get<std::vector<double>>();
        m.rho = j.at("rho").get<double>();
        m.nu = j.at("nu").get<double>();
        m.support = j.at("support").get<std::vector<std::size_t>>();
        record.model = std::move(m);
    } else if (type == "logreg") {
        LogRegModel m;
        const auto w = j.at("weights").get<std::vector<double>>();
        m.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
        m.bias = j.at("bias").get<double>();
        m.C = j.at("C").get<double>();
        record.model = std::move(m);
    } else {
        throw SchemaError("unknown model type '" + type + "'");
    }
    record.kernel.reset();
    if (j.contains("kernel") && !j["kernel"].is_null()) {
        record.kernel = j["kernel"].get<KernelConfig>();
    }
    record.training_ids = j.value("training_ids", std::vector<std::string>{});
}

void save_model(const std::filesystem::path &path, const ModelRecord &record) {
    std::ofstream out(path);
    if (!out) {
        throw SchemaError("cannot open " + path.string() + " for writing");
    }
    out << nlohmann::json(record).dump(2) << '\n';
}

ModelRecord load_model(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open " + path.string());
    }
    try {
        return nlohmann::json::parse(in).get<ModelRecord>();
    } catch (const nlohmann::json::exception &e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

}  // namespace qfd
