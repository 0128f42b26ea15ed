#include "spiderlab/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "spiderlab/errors.hpp"
#include "spiderlab/rng.hpp"

namespace spiderlab {

std::string to_string(Objective o) { return o == Objective::Depth ? "depth" : "discount"; }

Objective parse_objective(const std::string& s) {
    if (s == "depth")
        return Objective::Depth;
    if (s == "discount")
        return Objective::Discount;
    throw ArgumentError("unknown objective '" + s + "' (expected depth or discount)");
}

bool regression_target(const TrainingExample& ex, Objective objective, double& z) {
    if (objective == Objective::Depth) {
        if (ex.depth_label == kUnreachable)
            return false;
        z = -static_cast<double>(ex.depth_label);
        return true;
    }
    z = ex.depth_label == kUnreachable ? 0.0 : ex.discount_label;
    return true;
}

namespace {

double eps_loss(double residual, double eps) { return std::max(0.0, std::abs(residual) - eps); }

double sparse_dot(const std::vector<double>& w, const TermVector& v) {
    double s = 0.0;
    for (const auto& e : v.entries)
        s += w[e.index] * e.weight;
    return s;
}

void check_indices(const TermVector& v, std::size_t dimension) {
    for (const auto& e : v.entries)
        if (e.index >= dimension)
            throw ArgumentError("feature index " + std::to_string(e.index) + " outside model dimension " +
                                std::to_string(dimension));
}

} // namespace

LinearModel train_regression(std::span<const TermVector> xs, std::span<const double> zs, std::size_t dimension,
                             Objective objective, const TrainParams& params) {
    if (xs.size() != zs.size())
        throw ArgumentError("training needs one target per vector");
    if (xs.size() < 2)
        throw TrainingError("training needs at least 2 examples with usable labels, got " +
                            std::to_string(xs.size()));
    if (!(params.lambda > 0.0) || params.epochs < 1 || params.epsilon < 0.0)
        throw ArgumentError("invalid training hyperparameters");
    if (std::all_of(zs.begin(), zs.end(), [&](double z) { return z == zs.front(); }))
        throw TrainingError("degenerate labels: every training target equals " + std::to_string(zs.front()));
    for (const auto& x : xs)
        check_indices(x, dimension);

    const std::size_t n = xs.size();
    LinearModel m;
    m.objective = objective;
    m.params = params;
    m.weights.assign(dimension, 0.0);

    // w = scale * v keeps the per-step shrink O(1).
    std::vector<double> v(dimension, 0.0);
    double scale = 1.0;
    double bias = 0.0;

    // Suffix average of the iterates over the second half of the epochs, kept lazily:
    // acc[k] holds the sum of w[k] up to the step at which coordinate k was last synced.
    const std::size_t average_from = params.epochs / 2;
    std::vector<double> acc(dimension, 0.0);
    std::vector<double> synced_at(dimension, 0.0);
    double scale_sum = 0.0;
    double bias_sum = 0.0;
    std::size_t averaged = 0;
    auto sync = [&](std::size_t k) {
        acc[k] += v[k] * (scale_sum - synced_at[k]);
        synced_at[k] = scale_sum;
    };

    Rng rng(params.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    auto current_loss = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += eps_loss(scale * sparse_dot(v, xs[i]) + bias - zs[i], params.epsilon);
        return s / static_cast<double>(n);
    };

    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        const bool averaging = epoch >= average_from;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (params.lambda * static_cast<double>(t));
            const double residual = scale * sparse_dot(v, xs[i]) + bias - zs[i];

            // Regulariser shrink: w <- (1 - eta * lambda) w = (1 - 1/t) w.
            if (t == 1) {
                std::fill(v.begin(), v.end(), 0.0);
                scale = 1.0;
            } else {
                scale *= 1.0 - 1.0 / static_cast<double>(t);
            }
            if (scale < 1e-100) {
                for (std::size_t k = 0; k < dimension; ++k) {
                    if (averaging)
                        sync(k);
                    v[k] *= scale;
                }
                scale = 1.0;
            }
            if (std::abs(residual) > params.epsilon) {
                const double g = residual > 0.0 ? 1.0 : -1.0;
                for (const auto& e : xs[i].entries) {
                    if (averaging)
                        sync(e.index);
                    v[e.index] -= eta * g * e.weight / scale;
                }
                bias -= eta * g;
            }
            if (averaging) {
                scale_sum += scale;
                bias_sum += bias;
                ++averaged;
            }
        }
        m.epoch_loss.push_back(current_loss());
    }
    for (std::size_t k = 0; k < dimension; ++k) {
        sync(k);
        m.weights[k] = acc[k] / static_cast<double>(averaged);
    }
    m.bias = bias_sum / static_cast<double>(averaged);
    return m;
}

LinearModel train(std::span<const TrainingExample> examples, std::size_t dimension, Objective objective,
                  const TrainParams& params) {
    std::vector<TermVector> xs;
    std::vector<double> zs;
    for (const auto& ex : examples) {
        double z = 0.0;
        if (!regression_target(ex, objective, z))
            continue;
        xs.push_back(ex.vector);
        zs.push_back(z);
    }
    return train_regression(xs, zs, dimension, objective, params);
}

double predict(const LinearModel& m, const TermVector& v) {
    check_indices(v, m.dimension());
    return sparse_dot(m.weights, v) + m.bias;
}

std::vector<double> predict_all(const LinearModel& m, std::span<const TermVector> vs) {
    for (const auto& v : vs)
        check_indices(v, m.dimension());
    std::vector<double> out(vs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(vs.size()); ++i)
        out[static_cast<std::size_t>(i)] = sparse_dot(m.weights, vs[static_cast<std::size_t>(i)]) + m.bias;
    return out;
}

namespace serial {
std::vector<double> predict_all(const LinearModel& m, std::span<const TermVector> vs) {
    std::vector<double> out;
    out.reserve(vs.size());
    for (const auto& v : vs)
        out.push_back(predict(m, v));
    return out;
}
} // namespace serial

std::vector<double> average_ranks(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]])
            ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ArgumentError("spearman needs equal-length samples");
    if (a.empty())
        return 0.0;
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0)
        return 0.0;
    return sab / std::sqrt(saa * sbb);
}

ModelReport evaluate_model(const LinearModel& m, std::span<const TrainingExample> examples) {
    if (examples.empty())
        throw ArgumentError("model evaluation needs at least one example");
    std::vector<double> pred, target;
    double loss = 0.0;
    for (const auto& ex : examples) {
        double z = 0.0;
        if (!regression_target(ex, m.objective, z))
            continue;
        const double p = predict(m, ex.vector);
        pred.push_back(p);
        target.push_back(z);
        loss += eps_loss(p - z, m.params.epsilon);
    }
    ModelReport r;
    r.examples = pred.size();
    r.spearman = spearman(pred, target);
    r.mean_loss = pred.empty() ? 0.0 : loss / static_cast<double>(pred.size());
    return r;
}

void LinearModel::write(std::ostream& out) const {
    const auto old_precision = out.precision(17);
    out << "dimension\t" << weights.size() << '\n'
        << "bias\t" << bias << '\n'
        << "objective\t" << to_string(objective) << '\n'
        << "lambda\t" << params.lambda << '\n'
        << "epochs\t" << params.epochs << '\n'
        << "epsilon\t" << params.epsilon << '\n'
        << "seed\t" << params.seed << '\n'
        << "weights\n";
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] != 0.0)
            out << i << '\t' << weights[i] << '\n';
    out.precision(old_precision);
}

LinearModel LinearModel::read(std::istream& in) {
    LinearModel m;
    std::string line;
    std::size_t lineno = 0;
    std::size_t dimension = 0;
    bool have_dimension = false;
    bool in_weights = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::istringstream ls(line);
        if (in_weights) {
            std::size_t idx = 0;
            double w = 0.0;
            if (!(ls >> idx >> w) || idx >= dimension)
                throw LoadError("malformed model weight", lineno);
            m.weights[idx] = w;
            continue;
        }
        std::string key, value;
        ls >> key >> value;
        try {
            if (key == "dimension") {
                dimension = std::stoul(value);
                m.weights.assign(dimension, 0.0);
                have_dimension = true;
            } else if (key == "bias") {
                m.bias = std::stod(value);
            } else if (key == "objective") {
                m.objective = parse_objective(value);
            } else if (key == "lambda") {
                m.params.lambda = std::stod(value);
            } else if (key == "epochs") {
                m.params.epochs = std::stoul(value);
            } else if (key == "epsilon") {
                m.params.epsilon = std::stod(value);
            } else if (key == "seed") {
                m.params.seed = std::stoull(value);
            } else if (key == "weights") {
                if (!have_dimension)
                    throw LoadError("model weights before dimension", lineno);
                in_weights = true;
            } else {
                throw LoadError("unknown model header key '" + key + "'", lineno);
            }
        } catch (const LoadError&) {
            throw;
        } catch (const std::exception&) {
            throw LoadError("malformed model header value for '" + key + "'", lineno);
        }
    }
    if (!have_dimension)
        throw LoadError("model file has no dimension");
    for (double w : m.weights)
        if (!std::isfinite(w))
            throw LoadError("model weights must be finite");
    if (!std::isfinite(m.bias))
        throw LoadError("model bias must be finite");
    return m;
}

void LinearModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out)
        throw LoadError("cannot write model file " + path.string());
    write(out);
}

LinearModel LinearModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw LoadError("cannot open model file " + path.string());
    return read(in);
}

} // namespace spiderlab
