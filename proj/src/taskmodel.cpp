#include "bal/taskmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace bal {

namespace {

// Logits W f + b into `out`, then softmax in place.
void softmax_row(const TrainedModel& model, std::span<const float> f, std::span<double> out) {
    const std::size_t c = model.classes();
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c; ++k) {
        double z = model.bias[k];
        const auto w = model.weights.row(k);
        for (std::size_t d = 0; d < f.size(); ++d) z += w[d] * static_cast<double>(f[d]);
        out[k] = z;
        top = std::max(top, z);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
        out[k] = std::exp(out[k] - top);
        sum += out[k];
    }
    for (std::size_t k = 0; k < c; ++k) out[k] /= sum;
}

std::size_t argmax(std::span<const double> p) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.size(); ++k) {
        if (p[k] > p[best]) best = k;
    }
    return best;
}

void check_rows(const FeatureMatrix& features, std::span<const std::size_t> rows) {
    for (std::size_t r : rows) {
        if (r >= features.n_rows) throw InvalidArgument("row " + std::to_string(r) + " outside feature matrix");
    }
}

void check_model_dims(const TrainedModel& model, const FeatureMatrix& features) {
    if (model.weights.cols() != features.n_cols || model.bias.size() != model.classes()) {
        throw InvalidArgument("model dimension " + std::to_string(model.weights.cols()) +
                              " does not match feature dimension " + std::to_string(features.n_cols));
    }
}

std::vector<std::uint32_t> labels_of(const FeatureMatrix& m, std::span<const std::size_t> rows) {
    if (!m.labels) throw InvalidArgument("feature matrix carries no labels");
    check_rows(m, rows);
    std::vector<std::uint32_t> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back((*m.labels)[r]);
    return out;
}

}  // namespace

const char* to_string(ModelKind kind) {
    return kind == ModelKind::SoftmaxRegression ? "softmax" : "external";
}

const char* to_string(TrainMode mode) {
    return mode == TrainMode::Warm ? "warm" : "cold";
}

ModelKind parse_model_kind(const std::string& s) {
    if (s == "softmax" || s == "softmax_regression") return ModelKind::SoftmaxRegression;
    if (s == "external") return ModelKind::External;
    throw InvalidArgument("unknown model kind '" + s + "'");
}

TrainMode parse_train_mode(const std::string& s) {
    if (s == "warm") return TrainMode::Warm;
    if (s == "cold") return TrainMode::Cold;
    throw InvalidArgument("unknown train mode '" + s + "'");
}

void TaskModelSpec::validate() const {
    if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
    if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
    if (!(l2 >= 0.0)) throw InvalidArgument("l2 must be >= 0");
    if (kind == ModelKind::External && (posteriors_template.empty() || accuracy_template.empty())) {
        throw InvalidArgument("external model needs posteriors_template and accuracy_template");
    }
}

TrainedModel zero_model(std::size_t classes, std::size_t dim) {
    TrainedModel m;
    m.weights = Matrix(classes, dim);
    m.bias.assign(classes, 0.0);
    return m;
}

LossGradient softmax_loss_gradient(const TrainedModel& model, const FeatureMatrix& features,
                                   std::span<const std::size_t> rows, std::span<const std::uint32_t> labels,
                                   double l2) {
    check_model_dims(model, features);
    if (rows.empty()) throw InvalidArgument("loss over an empty row set");
    if (labels.size() != rows.size()) throw InvalidArgument("labels and rows differ in length");
    const std::size_t c = model.classes();
    const std::size_t dim = features.n_cols;
    LossGradient out;
    out.grad_weights = Matrix(c, dim);
    out.grad_bias.assign(c, 0.0);
    std::vector<double> p(c);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto f = features.row(rows[i]);
        softmax_row(model, f, p);
        const std::uint32_t y = labels[i];
        if (y >= c) throw InvalidArgument("label " + std::to_string(y) + " outside model classes");
        out.loss -= std::log(std::max(p[y], std::numeric_limits<double>::min())) * inv_n;
        for (std::size_t k = 0; k < c; ++k) {
            const double g = (p[k] - (k == y ? 1.0 : 0.0)) * inv_n;
            out.grad_bias[k] += g;
            auto gw = out.grad_weights.row(k);
            for (std::size_t d = 0; d < dim; ++d) gw[d] += g * static_cast<double>(f[d]);
        }
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
        auto gw = out.grad_weights.row(k);
        const auto w = model.weights.row(k);
        for (std::size_t d = 0; d < dim; ++d) {
            norm += w[d] * w[d];
            gw[d] += l2 * w[d];
        }
    }
    out.loss += 0.5 * l2 * norm;
    return out;
}

TrainedModel train(const TaskModelSpec& spec, const FeatureMatrix& features, std::span<const std::size_t> rows,
                   std::span<const std::uint32_t> labels, std::uint32_t class_count, const TrainedModel* start,
                   std::vector<double>* loss_trace) {
    spec.validate();
    if (rows.empty()) throw InvalidArgument("cannot train on an empty labeled set");
    if (class_count == 0) throw InvalidArgument("class count must be known to train");
    check_rows(features, rows);

    TrainedModel model = start ? *start : zero_model(class_count, features.n_cols);
    if (model.classes() != class_count) throw InvalidArgument("warm-start model has a different class count");
    check_model_dims(model, features);

    for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
        const auto g = softmax_loss_gradient(model, features, rows, labels, spec.l2);
        if (loss_trace) loss_trace->push_back(g.loss);
        auto& w = model.weights.values();
        const auto& gw = g.grad_weights.values();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= spec.learning_rate * gw[i];
        for (std::size_t k = 0; k < class_count; ++k) model.bias[k] -= spec.learning_rate * g.grad_bias[k];
    }
    if (loss_trace) loss_trace->push_back(softmax_loss_gradient(model, features, rows, labels, spec.l2).loss);

    const std::set<std::uint32_t> present(labels.begin(), labels.end());
    model.degenerate = present.size() < 2;
    model.train_accuracy = evaluate(model, features, rows, labels);
    return model;
}

TrainedModel train(const TaskModelSpec& spec, const FeatureMatrix& labeled, std::span<const std::size_t> rows) {
    const auto labels = labels_of(labeled, rows);
    return train(spec, labeled, rows, labels, labeled.class_count);
}

Matrix predict_proba(const TrainedModel& model, const FeatureMatrix& features, std::span<const std::size_t> rows) {
    check_model_dims(model, features);
    check_rows(features, rows);
    Matrix out(rows.size(), model.classes());
    for (std::size_t i = 0; i < rows.size(); ++i) softmax_row(model, features.row(rows[i]), out.row(i));
    return out;
}

double evaluate(const TrainedModel& model, const FeatureMatrix& features, std::span<const std::size_t> rows,
                std::span<const std::uint32_t> labels) {
    if (rows.empty()) throw InvalidArgument("evaluation set is empty");
    if (labels.size() != rows.size()) throw InvalidArgument("labels and rows differ in length");
    const Matrix p = predict_proba(model, features, rows);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (argmax(p.row(i)) == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(rows.size());
}

double evaluate(const TrainedModel& model, const FeatureMatrix& labeled, std::span<const std::size_t> rows) {
    const auto labels = labels_of(labeled, rows);
    return evaluate(model, labeled, rows, labels);
}

SoftmaxTaskModel::SoftmaxTaskModel(TaskModelSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
}

void SoftmaxTaskModel::train(const TrainRequest& request) {
    const TrainedModel* start = request.warm && model_ ? &*model_ : nullptr;
    model_ = bal::train(spec_, *request.features, request.rows, request.labels, request.class_count, start);
}

Matrix SoftmaxTaskModel::predict_proba(const FeatureMatrix& features, std::span<const std::size_t> rows) const {
    if (!model_) throw InvalidArgument("model used before training");
    return bal::predict_proba(*model_, features, rows);
}

double SoftmaxTaskModel::evaluate(const FeatureMatrix& features, std::span<const std::size_t> rows,
                                  std::span<const std::uint32_t> labels) const {
    if (!model_) throw InvalidArgument("model used before training");
    return bal::evaluate(*model_, features, rows, labels);
}

std::unique_ptr<TaskModel> SoftmaxTaskModel::fresh() const {
    return std::make_unique<SoftmaxTaskModel>(spec_);
}

ExternalTaskModel::ExternalTaskModel(TaskModelSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
}

std::string ExternalTaskModel::expand(const std::string& pattern) const {
    std::string out = pattern;
    auto replace = [&out](const std::string& key, const std::string& value) {
        for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size())) {
            out.replace(pos, key.size(), value);
        }
    };
    replace("{cycle}", std::to_string(cycle_));
    replace("{candidate}", candidate_ ? std::to_string(*candidate_) : std::string());
    return out;
}

void ExternalTaskModel::train(const TrainRequest& request) {
    cycle_ = request.cycle;
    candidate_ = request.candidate;
}

Matrix ExternalTaskModel::predict_proba(const FeatureMatrix& features, std::span<const std::size_t> rows) const {
    if (cycle_ == 0) throw InvalidArgument("external model used before its first cycle");
    const auto path = expand(spec_.posteriors_template);
    const FeatureMatrix posteriors = read_fmat(path);
    if (posteriors.n_rows != features.n_rows) {
        throw InvalidArgument(path + ": " + std::to_string(posteriors.n_rows) + " posterior rows for a pool of " +
                              std::to_string(features.n_rows));
    }
    check_rows(features, rows);
    Matrix out(rows.size(), posteriors.n_cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = posteriors.row(rows[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

double ExternalTaskModel::evaluate(const FeatureMatrix&, std::span<const std::size_t>,
                                   std::span<const std::uint32_t>) const {
    if (cycle_ == 0) throw InvalidArgument("external model used before its first cycle");
    const auto path = expand(spec_.accuracy_template);
    const std::string text = read_text_file(path);
    try {
        std::size_t used = 0;
        const double acc = std::stod(text, &used);
        if (!(acc >= 0.0 && acc <= 1.0)) throw InvalidArgument(path + ": accuracy outside [0, 1]");
        return acc;
    } catch (const std::logic_error&) {
        throw FormatError(FormatErrorKind::NonNumeric, path + ": accuracy is not a number");
    }
}

std::unique_ptr<TaskModel> ExternalTaskModel::fresh() const {
    return std::make_unique<ExternalTaskModel>(spec_);
}

std::unique_ptr<TaskModel> make_task_model(const TaskModelSpec& spec) {
    if (spec.kind == ModelKind::External) return std::make_unique<ExternalTaskModel>(spec);
    return std::make_unique<SoftmaxTaskModel>(spec);
}

}  // namespace bal
