#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spiderlab/labeling.hpp"
#include "spiderlab/text.hpp"

namespace spiderlab {

enum class Objective { Depth, Discount };

std::string to_string(Objective o);
Objective parse_objective(const std::string& s);

struct TrainParams {
    double lambda = 1e-4;
    std::size_t epochs = 20;
    double epsilon = 0.1;
    std::uint64_t seed = 1;
};

/// Linear quality estimator: score(v) = <weights, v> + bias. Higher is more promising.
struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    Objective objective = Objective::Depth;
    TrainParams params;
    /// Mean epsilon-insensitive training loss after each epoch. Not serialised.
    std::vector<double> epoch_loss;

    std::size_t dimension() const { return weights.size(); }

    void write(std::ostream& out) const;
    static LinearModel read(std::istream& in);
    void save(const std::filesystem::path& path) const;
    static LinearModel load(const std::filesystem::path& path);
};

/// Regression target of an example, or false when the example has no usable label.
bool regression_target(const TrainingExample& ex, Objective objective, double& z);

/// Linear support-vector regression on the epsilon-insensitive loss by stochastic subgradient
/// descent with step 1/(lambda t). Depth examples regress on -depth; unreachable pages are
/// skipped for the depth objective and get reward 0 for the discount objective.
LinearModel train(std::span<const TrainingExample> examples, std::size_t dimension, Objective objective,
                  const TrainParams& params);

/// Raw (vector, target) form used by train() and by tests with synthetic data.
LinearModel train_regression(std::span<const TermVector> xs, std::span<const double> zs, std::size_t dimension,
                             Objective objective, const TrainParams& params);

double predict(const LinearModel& m, const TermVector& v);

/// Predictions for many vectors in parallel; results are in input order.
std::vector<double> predict_all(const LinearModel& m, std::span<const TermVector> vs);
namespace serial {
std::vector<double> predict_all(const LinearModel& m, std::span<const TermVector> vs);
}

struct ModelReport {
    double spearman = 0.0;
    double mean_loss = 0.0;
    std::size_t examples = 0;
};

ModelReport evaluate_model(const LinearModel& m, std::span<const TrainingExample> examples);

/// Spearman rank correlation with average ranks on ties; 0 when either side is constant.
double spearman(std::span<const double> a, std::span<const double> b);

/// Average (1-based) ranks, ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

} // namespace spiderlab
