#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "spiderlab/errors.hpp"
#include "spiderlab/ranker.hpp"

using namespace spiderlab;

namespace {

TermVector axis(std::uint32_t i, double w = 1.0) { return TermVector{{{i, w}}}; }

struct Synthetic {
    std::vector<TermVector> x_train, x_test;
    std::vector<double> z_train, z_test;
};

/// Sparse unit-norm vectors with z = <w*, x> + noise, w* ~ N(0, 1).
Synthetic synthetic(std::uint64_t seed, std::size_t dim, double noise_sd) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<std::uint32_t> coord(0, static_cast<std::uint32_t>(dim - 1));
    std::vector<double> w(dim);
    for (auto& v : w)
        v = normal(rng);
    auto draw = [&](std::size_t n, std::vector<TermVector>& xs, std::vector<double>& zs) {
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<double> dense(dim, 0.0);
            for (int j = 0; j < 8; ++j)
                dense[coord(rng)] = std::abs(normal(rng)) + 0.1;
            double norm = 0.0;
            for (double d : dense)
                norm += d * d;
            norm = std::sqrt(norm);
            TermVector v;
            double z = 0.0;
            for (std::uint32_t i = 0; i < dim; ++i)
                if (dense[i] != 0.0) {
                    v.entries.push_back({i, dense[i] / norm});
                    z += w[i] * dense[i] / norm;
                }
            xs.push_back(std::move(v));
            zs.push_back(z + noise_sd * normal(rng));
        }
    };
    Synthetic s;
    draw(500, s.x_train, s.z_train);
    draw(200, s.x_test, s.z_test);
    return s;
}

double held_out_spearman(const Synthetic& s, const TrainParams& p) {
    const auto m = train_regression(s.x_train, s.z_train, 100, Objective::Discount, p);
    const auto pred = predict_all(m, s.x_test);
    return spearman(pred, s.z_test);
}

TrainingExample example(std::uint32_t term, int depth, double discount) {
    TrainingExample e;
    e.page = term;
    e.vector = axis(term);
    e.depth_label = depth;
    e.discount_label = discount;
    return e;
}

} // namespace

TEST_CASE("objective names") {
    CHECK(to_string(Objective::Depth) == "depth");
    CHECK(to_string(Objective::Discount) == "discount");
    CHECK(parse_objective("discount") == Objective::Discount);
    CHECK_THROWS_AS(parse_objective("reward"), ArgumentError);
}

TEST_CASE("a separable pair is ranked correctly") {
    const std::vector<TermVector> xs{axis(0), axis(1)};
    const std::vector<double> zs{1.0, -1.0};
    const auto m = train_regression(xs, zs, 2, Objective::Discount, TrainParams{});
    CHECK(predict(m, axis(0)) > predict(m, axis(1)));
}

TEST_CASE("noisy synthetic data is learned at the default settings") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = synthetic(seed, 100, 0.1);
        CHECK(held_out_spearman(s, TrainParams{}) >= 0.9);
    }
}

TEST_CASE("noise-free synthetic data reaches 0.99 held-out Spearman") {
    TrainParams p;
    p.lambda = 1e-3;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = synthetic(seed, 100, 0.0);
        CHECK(held_out_spearman(s, p) >= 0.99);
    }
}

TEST_CASE("training is deterministic in the seed") {
    const auto s = synthetic(4, 100, 0.1);
    TrainParams p;
    p.seed = 9;
    const auto a = train_regression(s.x_train, s.z_train, 100, Objective::Discount, p);
    const auto b = train_regression(s.x_train, s.z_train, 100, Objective::Discount, p);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
    p.seed = 10;
    const auto c = train_regression(s.x_train, s.z_train, 100, Objective::Discount, p);
    CHECK(a.weights != c.weights);
}

TEST_CASE("weights and bias are finite and sized to the dimension") {
    const auto s = synthetic(2, 100, 0.1);
    const auto m = train_regression(s.x_train, s.z_train, 100, Objective::Discount, TrainParams{});
    REQUIRE(m.dimension() == 100);
    for (double w : m.weights)
        CHECK(std::isfinite(w));
    CHECK(std::isfinite(m.bias));
}

TEST_CASE("training loss at the last epoch is no higher than after the first") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = synthetic(seed, 100, 0.1);
        const auto m = train_regression(s.x_train, s.z_train, 100, Objective::Discount, TrainParams{});
        REQUIRE(m.epoch_loss.size() == 20);
        CHECK(m.epoch_loss.back() <= m.epoch_loss.front());
    }
}

TEST_CASE("predict examples") {
    LinearModel zero;
    zero.weights.assign(3, 0.0);
    CHECK(predict(zero, TermVector{{{0, 0.3}, {2, 0.7}}}) == 0.0);

    LinearModel e0;
    e0.weights = {1.0, 0.0, 0.0};
    CHECK(predict(e0, axis(0)) == 1.0);

    e0.bias = -2.5;
    CHECK(predict(e0, TermVector{}) == -2.5);
    CHECK_THROWS_AS(predict(e0, axis(3)), ArgumentError);
}

TEST_CASE("adding to the bias shifts every score equally") {
    const auto s = synthetic(3, 100, 0.1);
    auto m = train_regression(s.x_train, s.z_train, 100, Objective::Discount, TrainParams{});
    const auto before = predict_all(m, s.x_test);
    m.bias += 3.25;
    const auto after = predict_all(m, s.x_test);
    std::size_t best_before = 0, best_after = 0;
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(after[i] - before[i] == doctest::Approx(3.25).epsilon(1e-12));
        if (before[i] > before[best_before])
            best_before = i;
        if (after[i] > after[best_after])
            best_after = i;
    }
    CHECK(best_before == best_after);
}

TEST_CASE("prediction is linear in the vector") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    LinearModel m;
    m.weights.resize(50);
    for (auto& w : m.weights)
        w = normal(rng);
    m.bias = 0.75;
    std::uniform_int_distribution<std::uint32_t> coord(0, 49);
    for (int trial = 0; trial < 50; ++trial) {
        // disjoint supports: u on even coordinates, v on odd
        TermVector u, v, sum;
        const double a = normal(rng), b = normal(rng);
        for (std::uint32_t i = 0; i < 50; ++i) {
            if (coord(rng) % 4 != 0)
                continue;
            const double x = normal(rng);
            (i % 2 == 0 ? u : v).entries.push_back({i, x});
            sum.entries.push_back({i, (i % 2 == 0 ? a : b) * x});
        }
        double du = 0.0, dv = 0.0;
        for (const auto& e : u.entries)
            du += m.weights[e.index] * e.weight;
        for (const auto& e : v.entries)
            dv += m.weights[e.index] * e.weight;
        CHECK(predict(m, sum) == doctest::Approx(a * du + b * dv + m.bias).epsilon(1e-12));
    }
}

TEST_CASE("predict_all matches the serial form and predict") {
    const auto s = synthetic(6, 100, 0.1);
    const auto m = train_regression(s.x_train, s.z_train, 100, Objective::Discount, TrainParams{});
    const auto par = predict_all(m, s.x_train);
    const auto ser = serial::predict_all(m, s.x_train);
    REQUIRE(par.size() == s.x_train.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i] == ser[i]);
        CHECK(par[i] == predict(m, s.x_train[i]));
    }
}

TEST_CASE("regression targets by objective") {
    double z = 0.0;
    CHECK(regression_target(example(0, 3, 0.125), Objective::Depth, z));
    CHECK(z == -3.0);
    CHECK(regression_target(example(0, 3, 0.125), Objective::Discount, z));
    CHECK(z == 0.125);
    CHECK_FALSE(regression_target(example(0, kUnreachable, 0.0), Objective::Depth, z));
    CHECK(regression_target(example(0, kUnreachable, 0.0), Objective::Discount, z));
    CHECK(z == 0.0);
}

TEST_CASE("train on examples ranks shallow pages above deep ones") {
    std::vector<TrainingExample> ex{example(0, 0, 1.0), example(1, 1, 0.5), example(2, 2, 0.25),
                                    example(3, kUnreachable, 0.0)};
    // four examples give too few updates for the default lambda to settle
    TrainParams p;
    p.lambda = 0.01;
    p.epochs = 200;
    const auto depth = train(ex, 4, Objective::Depth, p);
    CHECK(depth.objective == Objective::Depth);
    CHECK(predict(depth, axis(0)) > predict(depth, axis(1)));
    CHECK(predict(depth, axis(1)) > predict(depth, axis(2)));
    const auto disc = train(ex, 4, Objective::Discount, p);
    CHECK(predict(disc, axis(0)) > predict(disc, axis(2)));
}

TEST_CASE("training errors") {
    std::vector<TrainingExample> one{example(0, 1, 0.5)};
    CHECK_THROWS_AS(train(one, 2, Objective::Depth, TrainParams{}), TrainingError);

    // only one usable label under the depth objective
    std::vector<TrainingExample> unreachable{example(0, 1, 0.5), example(1, kUnreachable, 0.0)};
    CHECK_THROWS_AS(train(unreachable, 2, Objective::Depth, TrainParams{}), TrainingError);

    std::vector<TrainingExample> same{example(0, 2, 0.25), example(1, 2, 0.25)};
    try {
        train(same, 2, Objective::Depth, TrainParams{});
        FAIL("expected a TrainingError");
    } catch (const TrainingError& e) {
        CHECK(std::string(e.what()).find("degenerate") != std::string::npos);
    }

    TrainParams bad;
    bad.lambda = 0.0;
    std::vector<TrainingExample> ok{example(0, 0, 1.0), example(1, 1, 0.5)};
    CHECK_THROWS_AS(train(ok, 2, Objective::Depth, bad), ArgumentError);
    bad = TrainParams{};
    bad.epochs = 0;
    CHECK_THROWS_AS(train(ok, 2, Objective::Depth, bad), ArgumentError);
}

TEST_CASE("evaluate_model examples") {
    LinearModel m;
    m.weights = {1.0, 2.0, 3.0, 4.0};
    std::vector<TrainingExample> ex{example(0, 0, 1.0), example(1, 0, 2.0), example(2, 0, 3.0), example(3, 0, 4.0)};
    m.objective = Objective::Discount;
    auto r = evaluate_model(m, ex);
    CHECK(r.spearman == doctest::Approx(1.0));
    CHECK(r.examples == 4);
    CHECK(r.mean_loss == 0.0);

    m.weights = {4.0, 3.0, 2.0, 1.0};
    CHECK(evaluate_model(m, ex).spearman == doctest::Approx(-1.0));

    m.weights = {0.0, 0.0, 0.0, 0.0};
    m.bias = 2.0;
    r = evaluate_model(m, ex);
    CHECK(r.spearman == 0.0);
    // |2 - z| - 0.1 clipped at zero, for z = 1, 2, 3, 4
    CHECK(r.mean_loss == doctest::Approx((0.9 + 0.0 + 0.9 + 1.9) / 4.0));

    CHECK_THROWS_AS(evaluate_model(m, std::vector<TrainingExample>{}), ArgumentError);
}

TEST_CASE("average ranks and spearman by hand") {
    const std::vector<double> xs{10.0, 20.0, 20.0, 5.0};
    CHECK(average_ranks(xs) == std::vector<double>{2.0, 3.5, 3.5, 1.0});
    const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> b{1.0, 3.0, 2.0, 4.0};
    // 1 - 6 * sum d^2 / (n (n^2 - 1)) = 1 - 6 * 2 / 60
    CHECK(spearman(a, b) == doctest::Approx(0.8));
    const std::vector<double> c{7.0, 7.0, 7.0, 7.0};
    CHECK(spearman(a, c) == 0.0);
    CHECK_THROWS_AS(spearman(a, std::vector<double>{1.0}), ArgumentError);
}

TEST_CASE("models round-trip through text") {
    const auto s = synthetic(8, 100, 0.1);
    TrainParams p;
    p.seed = 17;
    p.epochs = 7;
    const auto m = train_regression(s.x_train, s.z_train, 100, Objective::Discount, p);
    std::stringstream io;
    m.write(io);
    const auto back = LinearModel::read(io);
    CHECK(back.weights == m.weights);
    CHECK(back.bias == m.bias);
    CHECK(back.objective == m.objective);
    CHECK(back.params.seed == 17);
    CHECK(back.params.epochs == 7);
    CHECK(back.params.lambda == m.params.lambda);
    CHECK(back.params.epsilon == m.params.epsilon);

    std::istringstream no_dim("bias\t0.5\n");
    CHECK_THROWS_AS(LinearModel::read(no_dim), LoadError);
    std::istringstream unknown("dimension\t2\ncolour\tred\n");
    CHECK_THROWS_AS(LinearModel::read(unknown), LoadError);
}
