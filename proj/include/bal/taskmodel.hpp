#ifndef BAL_TASKMODEL_HPP
#define BAL_TASKMODEL_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bal/featio.hpp"
#include "bal/matrix.hpp"

namespace bal {

enum class ModelKind { SoftmaxRegression, External };
enum class TrainMode { Warm, Cold };

const char* to_string(ModelKind kind);
const char* to_string(TrainMode mode);
ModelKind parse_model_kind(const std::string& s);
TrainMode parse_train_mode(const std::string& s);

struct TaskModelSpec {
    ModelKind kind = ModelKind::SoftmaxRegression;
    double learning_rate = 0.1;
    std::size_t epochs = 200;
    double l2 = 1e-3;
    std::uint64_t seed = 0;
    // External kind only. "{cycle}" and "{candidate}" are substituted.
    std::string posteriors_template;
    std::string accuracy_template;

    void validate() const;
};

struct TrainedModel {
    Matrix weights;  // C x D
    std::vector<double> bias;
    double train_accuracy = 0.0;
    // Fewer than two classes were present in the training rows.
    bool degenerate = false;

    std::size_t classes() const { return weights.rows(); }
};

TrainedModel zero_model(std::size_t classes, std::size_t dim);

struct LossGradient {
    double loss = 0.0;
    Matrix grad_weights;
    std::vector<double> grad_bias;
};

// Mean multinomial cross-entropy plus (l2 / 2) * |W|^2 over the given rows,
// with its analytic gradient. The bias is not regularized.
LossGradient softmax_loss_gradient(const TrainedModel& model, const FeatureMatrix& features,
                                   std::span<const std::size_t> rows, std::span<const std::uint32_t> labels,
                                   double l2);

// Full-batch gradient descent for spec.epochs steps from zero weights, or
// from `start` when given. loss_trace, if set, receives the loss before
// every step and after the last one.
TrainedModel train(const TaskModelSpec& spec, const FeatureMatrix& features, std::span<const std::size_t> rows,
                   std::span<const std::uint32_t> labels, std::uint32_t class_count,
                   const TrainedModel* start = nullptr, std::vector<double>* loss_trace = nullptr);

// Labels taken from the matrix itself.
TrainedModel train(const TaskModelSpec& spec, const FeatureMatrix& labeled, std::span<const std::size_t> rows);

// softmax(W f + b) per requested row.
Matrix predict_proba(const TrainedModel& model, const FeatureMatrix& features, std::span<const std::size_t> rows);

// Fraction of rows whose argmax (lowest class id on ties) equals the label.
double evaluate(const TrainedModel& model, const FeatureMatrix& features, std::span<const std::size_t> rows,
                std::span<const std::uint32_t> labels);
double evaluate(const TrainedModel& model, const FeatureMatrix& labeled, std::span<const std::size_t> rows);

struct TrainRequest {
    const FeatureMatrix* features = nullptr;
    std::span<const std::size_t> rows;
    std::span<const std::uint32_t> labels;
    std::uint32_t class_count = 0;
    std::size_t cycle = 1;
    // Set while evaluating balancing-factor candidates.
    std::optional<std::size_t> candidate;
    bool warm = false;
};

// The main-task model driven by the selection loop.
class TaskModel {
public:
    virtual ~TaskModel() = default;

    virtual void train(const TrainRequest& request) = 0;
    virtual Matrix predict_proba(const FeatureMatrix& features, std::span<const std::size_t> rows) const = 0;
    virtual double evaluate(const FeatureMatrix& features, std::span<const std::size_t> rows,
                            std::span<const std::uint32_t> labels) const = 0;
    // Untrained instance with the same configuration.
    virtual std::unique_ptr<TaskModel> fresh() const = 0;
    // Parameters of the in-process surrogate; empty for external models.
    virtual std::optional<TrainedModel> snapshot() const { return std::nullopt; }
    virtual bool degenerate() const { return false; }
    virtual double train_accuracy() const { return 0.0; }
};

class SoftmaxTaskModel : public TaskModel {
public:
    explicit SoftmaxTaskModel(TaskModelSpec spec);

    void train(const TrainRequest& request) override;
    Matrix predict_proba(const FeatureMatrix& features, std::span<const std::size_t> rows) const override;
    double evaluate(const FeatureMatrix& features, std::span<const std::size_t> rows,
                    std::span<const std::uint32_t> labels) const override;
    std::unique_ptr<TaskModel> fresh() const override;
    std::optional<TrainedModel> snapshot() const override { return model_; }
    bool degenerate() const override { return model_ && model_->degenerate; }
    double train_accuracy() const override { return model_ ? model_->train_accuracy : 0.0; }

private:
    TaskModelSpec spec_;
    std::optional<TrainedModel> model_;
};

// Posteriors and accuracy produced by an outside training pipeline: an
// N x C FMAT file and a one-line text file per cycle, located through the
// TaskModelSpec path templates.
class ExternalTaskModel : public TaskModel {
public:
    explicit ExternalTaskModel(TaskModelSpec spec);

    void train(const TrainRequest& request) override;
    Matrix predict_proba(const FeatureMatrix& features, std::span<const std::size_t> rows) const override;
    double evaluate(const FeatureMatrix& features, std::span<const std::size_t> rows,
                    std::span<const std::uint32_t> labels) const override;
    std::unique_ptr<TaskModel> fresh() const override;

private:
    std::string expand(const std::string& pattern) const;

    TaskModelSpec spec_;
    std::size_t cycle_ = 0;
    std::optional<std::size_t> candidate_;
};

std::unique_ptr<TaskModel> make_task_model(const TaskModelSpec& spec);

}  // namespace bal

#endif  // BAL_TASKMODEL_HPP
