#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bal/taskmodel.hpp"
#include "test_util.hpp"

using namespace bal;
using bal::test::make_matrix;
using bal::test::random_matrix;
using bal::test::temp_dir;

namespace {

TrainedModel random_model(std::size_t classes, std::size_t dim, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, scale);
    TrainedModel m = zero_model(classes, dim);
    for (double& w : m.weights.values()) w = g(rng);
    for (double& b : m.bias) b = g(rng);
    return m;
}

std::vector<std::uint32_t> random_labels(std::size_t n, std::uint32_t classes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint32_t> out(n);
    for (auto& l : out) l = static_cast<std::uint32_t>(rng() % classes);
    return out;
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

// Two 2-D classes split by the line x = 0 with a margin of 1.
FeatureMatrix separable(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> gap(1.0, 4.0);
    std::uniform_real_distribution<double> y(-3.0, 3.0);
    FeatureMatrix m;
    m.n_rows = 100;
    m.n_cols = 2;
    std::vector<std::uint32_t> labels;
    for (std::size_t i = 0; i < 100; ++i) {
        const bool positive = i % 2 == 1;
        m.data.push_back(static_cast<float>(positive ? gap(rng) : -gap(rng)));
        m.data.push_back(static_cast<float>(y(rng)));
        labels.push_back(positive ? 1 : 0);
    }
    m.labels = labels;
    m.class_count = 2;
    return m;
}

double softmax_oracle(const TrainedModel& m, std::span<const float> f, std::size_t k) {
    std::vector<double> z(m.classes());
    for (std::size_t c = 0; c < m.classes(); ++c) {
        z[c] = m.bias[c];
        for (std::size_t d = 0; d < f.size(); ++d) z[c] += m.weights(c, d) * f[d];
    }
    double denom = 0.0;
    for (double v : z) denom += std::exp(v);
    return std::exp(z[k]) / denom;
}

}  // namespace

TEST_SUITE("taskmodel") {

TEST_CASE("separable classes reach full training accuracy with defaults") {
    const FeatureMatrix m = separable(3);
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        REQUIRE(((*m.labels)[i] == 1) == (m.row(i)[0] >= 1.0f));
        REQUIRE(((*m.labels)[i] == 0) == (m.row(i)[0] <= -1.0f));
    }
    const TrainedModel model = train(TaskModelSpec{}, m, all_rows(100));
    CHECK(model.train_accuracy == 1.0);
    CHECK(evaluate(model, m, all_rows(100)) == 1.0);
    CHECK_FALSE(model.degenerate);
}

TEST_CASE("zero weights predict the uniform distribution exactly") {
    const FeatureMatrix f = random_matrix(10, 4, 1);
    const Matrix p = predict_proba(zero_model(5, 4), f, all_rows(10));
    for (double v : p.values()) CHECK(v == 0.2);
}

TEST_CASE("duplicating every labeled row leaves the weights unchanged") {
    const FeatureMatrix f = random_matrix(30, 3, 2, -1.0, 1.0);
    const auto labels = random_labels(30, 3, 2);
    auto rows = all_rows(30);
    std::vector<std::size_t> doubled = rows;
    doubled.insert(doubled.end(), rows.begin(), rows.end());
    std::vector<std::uint32_t> doubled_labels = labels;
    doubled_labels.insert(doubled_labels.end(), labels.begin(), labels.end());
    const TrainedModel a = train(TaskModelSpec{}, f, rows, labels, 3);
    const TrainedModel b = train(TaskModelSpec{}, f, doubled, doubled_labels, 3);
    for (std::size_t i = 0; i < a.weights.values().size(); ++i) {
        CHECK(std::abs(a.weights.values()[i] - b.weights.values()[i]) <= 1e-8);
    }
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(a.bias[k] - b.bias[k]) <= 1e-8);
}

TEST_CASE("predict_proba matches a direct exp-normalize oracle") {
    const FeatureMatrix f = random_matrix(40, 6, 5);
    const TrainedModel m = random_model(4, 6, 5, 0.3);
    const Matrix p = predict_proba(m, f, all_rows(40));
    for (std::size_t r = 0; r < 40; ++r) {
        double sum = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(std::abs(p(r, k) - softmax_oracle(m, f.row(r), k)) <= 1e-9);
            CHECK(p(r, k) >= 0.0);
            sum += p(r, k);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-6);
    }
}

TEST_CASE("a dominant class weight saturates the posterior") {
    TrainedModel m = zero_model(3, 2);
    m.weights(0, 0) = 100.0;
    const FeatureMatrix f = make_matrix(1, 2, {1.0f, 0.0f});
    const std::size_t row[] = {0};
    CHECK(predict_proba(m, f, row)(0, 0) > 0.99);
}

TEST_CASE("evaluate examples") {
    // Exactly uniform rows: the tie rule predicts class 0 everywhere.
    FeatureMatrix f = random_matrix(20, 3, 4);
    std::vector<std::uint32_t> labels(20);
    for (std::size_t i = 0; i < 20; ++i) labels[i] = static_cast<std::uint32_t>(i % 10);
    f.labels = labels;
    f.class_count = 10;
    CHECK(evaluate(zero_model(10, 3), f, all_rows(20)) == 0.1);

    TrainedModel always3 = zero_model(5, 3);
    always3.bias[3] = 1.0;
    std::vector<std::uint32_t> threes(20, 3);
    CHECK(evaluate(always3, f, all_rows(20), threes) == 1.0);
    CHECK_THROWS_AS(evaluate(always3, f, {}, {}), InvalidArgument);
}

TEST_CASE("analytic gradient matches central differences") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const FeatureMatrix f = random_matrix(20, 4, seed, -2.0, 2.0);
        const auto labels = random_labels(20, 5, seed);
        const auto rows = all_rows(20);
        const double l2 = 0.01 * static_cast<double>(seed % 3);
        TrainedModel m = random_model(5, 4, seed + 100, 0.5);
        const LossGradient g = softmax_loss_gradient(m, f, rows, labels, l2);

        std::vector<double> analytic = g.grad_weights.values();
        analytic.insert(analytic.end(), g.grad_bias.begin(), g.grad_bias.end());
        std::vector<double> numeric;
        const double h = 1e-5;
        auto probe = [&](double& param) {
            const double keep = param;
            param = keep + h;
            const double up = softmax_loss_gradient(m, f, rows, labels, l2).loss;
            param = keep - h;
            const double down = softmax_loss_gradient(m, f, rows, labels, l2).loss;
            param = keep;
            numeric.push_back((up - down) / (2 * h));
        };
        for (double& w : m.weights.values()) probe(w);
        for (double& b : m.bias) probe(b);

        double diff = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < analytic.size(); ++i) {
            diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
            norm = std::max(norm, std::max(std::abs(analytic[i]), std::abs(numeric[i])));
        }
        CHECK(std::sqrt(diff) / std::max(norm, 1e-12) <= 1e-5);
    }
}

TEST_CASE("loss is non-increasing at a small learning rate") {
    const FeatureMatrix f = random_matrix(50, 4, 8, -1.0, 1.0);
    const auto labels = random_labels(50, 5, 8);
    TaskModelSpec spec;
    spec.learning_rate = 0.01;
    spec.epochs = 300;
    std::vector<double> trace;
    train(spec, f, all_rows(50), labels, 5, nullptr, &trace);
    REQUIRE(trace.size() == 301);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
    CHECK(trace.back() < trace.front());
}

TEST_CASE("training errors and the degenerate flag") {
    const FeatureMatrix f = random_matrix(10, 2, 9);
    CHECK_THROWS_AS(train(TaskModelSpec{}, f, {}, {}, 3), InvalidArgument);
    const std::size_t rows[] = {0, 1, 2};
    const std::uint32_t labels[] = {1, 1, 1};
    const TrainedModel single = train(TaskModelSpec{}, f, rows, labels, 3);
    CHECK(single.degenerate);
    CHECK_THROWS_AS(predict_proba(zero_model(3, 5), f, rows), InvalidArgument);
    TaskModelSpec bad;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = TaskModelSpec{};
    bad.epochs = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("training is deterministic") {
    const FeatureMatrix f = random_matrix(40, 3, 11);
    const auto labels = random_labels(40, 4, 11);
    const TrainedModel a = train(TaskModelSpec{}, f, all_rows(40), labels, 4);
    const TrainedModel b = train(TaskModelSpec{}, f, all_rows(40), labels, 4);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
}

TEST_CASE("warm training continues from the previous weights") {
    const FeatureMatrix f = random_matrix(40, 3, 12, -1.0, 1.0);
    const auto labels = random_labels(40, 3, 12);
    const auto rows = all_rows(40);
    TaskModelSpec spec;
    spec.epochs = 20;

    SoftmaxTaskModel warm(spec), cold(spec);
    TrainRequest req;
    req.features = &f;
    req.rows = rows;
    req.labels = labels;
    req.class_count = 3;
    warm.train(req);
    cold.train(req);
    req.warm = true;
    warm.train(req);
    req.warm = false;
    cold.train(req);

    const TrainedModel expected = train(spec, f, rows, labels, 3);
    const TrainedModel twice = train(spec, f, rows, labels, 3, &expected);
    CHECK(cold.snapshot()->weights == expected.weights);
    CHECK(warm.snapshot()->weights == twice.weights);
    CHECK_FALSE(warm.snapshot()->weights == cold.snapshot()->weights);
}

TEST_CASE("external model reads posteriors and accuracy through templates") {
    const auto dir = temp_dir("external");
    FeatureMatrix post = make_matrix(3, 2, {0.9f, 0.1f, 0.5f, 0.5f, 0.2f, 0.8f});
    write_fmat(post, dir / "post_2_.fmat");
    write_fmat(make_matrix(3, 2, {0.5f, 0.5f, 0.5f, 0.5f, 0.5f, 0.5f}), dir / "post_2_1.fmat");
    write_text_file(dir / "acc_2_.txt", "0.75\n");
    write_text_file(dir / "acc_2_1.txt", "0.5\n");

    TaskModelSpec spec;
    spec.kind = ModelKind::External;
    spec.posteriors_template = (dir / "post_{cycle}_{candidate}.fmat").string();
    spec.accuracy_template = (dir / "acc_{cycle}_{candidate}.txt").string();
    auto model = make_task_model(spec);
    const FeatureMatrix pool = random_matrix(3, 4, 0);
    const std::size_t rows[] = {2, 0};
    CHECK_THROWS_AS(model->predict_proba(pool, rows), InvalidArgument);

    TrainRequest req;
    req.features = &pool;
    req.cycle = 2;
    model->train(req);
    const Matrix p = model->predict_proba(pool, rows);
    CHECK(p(0, 1) == doctest::Approx(0.8));
    CHECK(p(1, 0) == doctest::Approx(0.9));
    CHECK(model->evaluate(pool, rows, {}) == 0.75);

    req.candidate = 1;
    auto trial = model->fresh();
    trial->train(req);
    CHECK(trial->evaluate(pool, rows, {}) == 0.5);
    CHECK(trial->predict_proba(pool, rows)(0, 0) == 0.5);

    req.cycle = 3;
    req.candidate.reset();
    model->train(req);
    CHECK_THROWS_AS(model->evaluate(pool, rows, {}), FormatError);

    TaskModelSpec incomplete;
    incomplete.kind = ModelKind::External;
    CHECK_THROWS_AS(make_task_model(incomplete), InvalidArgument);
}

}
