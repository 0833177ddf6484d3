#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qel/gradients.hpp"
#include "qel/model.hpp"
#include "qel/optimize.hpp"

namespace qel {

// affine min-max map of targets onto [0, 1], invertible
struct TargetScaling {
  double min = 0.0;
  double max = 1.0;

  double apply(double y) const { return (y - min) / (max - min); }
  double invert(double s) const { return min + s * (max - min); }
};

struct Dataset {
  struct Sample {
    std::vector<double> input;
    double target = 0.0;
  };
  std::vector<Sample> samples;
  std::optional<TargetScaling> scaling;  // set once targets were scaled
};

// Min-max scales all targets onto [0, 1] and records the inverse map.
// Throws when fewer than two distinct target values exist.
std::pair<Dataset, TargetScaling> scale_targets(const Dataset& dataset);

// first-order ODE f'(x) = rhs(x) with one boundary value, trained on a
// uniform collocation grid over [lo, hi]
struct OdeSpec {
  std::function<double(double)> rhs;
  double boundary_x = 0.0;
  double boundary_value = 0.0;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t collocation = 50;
  double boundary_weight = 1.0;
  // Derivative evaluations pull collocation points this far inside (-1, 1).
  // The Chebyshev chain factor grows as 1/sqrt(1 - x^2); enforcing the
  // residual at an endpoint clamped to 1 - 1e-7 makes that one term ~1e6x
  // stiffer than the interior and stalls training.
  double derivative_margin = 1e-3;

  std::vector<double> grid() const;  // uniform, endpoints included
  void validate() const;
};

struct TrainingError : std::runtime_error {
  TrainingError(const std::string& what, std::size_t epoch_index)
      : std::runtime_error(what + " (epoch " + std::to_string(epoch_index) + ")"),
        epoch(epoch_index) {}
  std::size_t epoch;
};

// Differentiable training objective on a model's theta.
class Loss {
public:
  virtual ~Loss() = default;
  virtual double value(const QuantumModel& model) const = 0;
  virtual GradientReport gradient(const QuantumModel& model) const = 0;
};

// mean over samples of (model(input) - target)^2
class MseLoss final : public Loss {
public:
  explicit MseLoss(Dataset dataset, std::size_t workers = 1);
  double value(const QuantumModel& model) const override;
  GradientReport gradient(const QuantumModel& model) const override;
  const Dataset& dataset() const { return dataset_; }

private:
  Dataset dataset_;
  std::size_t workers_;
};

// mean over the grid of (d model/dx - rhs)^2 plus a weighted boundary penalty
class OdeResidualLoss final : public Loss {
public:
  explicit OdeResidualLoss(OdeSpec ode, std::size_t workers = 1);
  double value(const QuantumModel& model) const override;
  GradientReport gradient(const QuantumModel& model) const override;
  const OdeSpec& ode() const { return ode_; }

private:
  OdeSpec ode_;
  std::vector<double> grid_;
  std::size_t workers_;
};

double mse_loss(const QuantumModel& model, const Dataset& dataset);
double ode_residual_loss(const QuantumModel& model, const OdeSpec& ode);

struct TrainReport {
  // loss before each epoch's update; {initial loss} when no epochs ran
  std::vector<double> loss_trajectory;
  double final_loss = 0.0;
  std::vector<double> final_theta;
  double wall_seconds = 0.0;
  bool improved = true;  // final_loss <= first trajectory entry
};

// Runs the optimizer stages in order (full-batch gradient per epoch) and
// freezes the model afterwards. The model must not already be frozen.
TrainReport fit(QuantumModel& model, const Loss& loss,
                std::span<const OptimizerConfig> stages);
TrainReport fit(QuantumModel& model, const Loss& loss,
                const OptimizerConfig& config);

// number of parallel workers: QEL_WORKERS env var, else hardware concurrency
std::size_t worker_count();

// deterministic parallel map: body(i) for i in [0, n), results independent
// of scheduling
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace qel
