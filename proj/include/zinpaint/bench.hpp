#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "zinpaint/blob.hpp"
#include "zinpaint/losses.hpp"
#include "zinpaint/optimizer.hpp"

namespace zinpaint {

// Seeded synthetic benchmark: planted blob-generator problems measuring the
// pool-initialization and warm-start speedups plus temporal consistency.
struct BenchConfig {
  // Single-blob corpus: with a 4-d latent the 300-entry pool covers the
  // search box densely enough for nearest-neighbor starts to matter.
  BlobSpec generator{1, 16, 16, 1, 1.5, 5.0};
  std::vector<int> d_hidden = {32};  // fixed random-weight discriminator
  std::uint64_t seed = 1;
  int pool_size = 300;
  LossWeights weights;  // lambda 0.01, gamma 0.01, mu 0.1
  OptimConfig optim;    // max_iters 1000
  int window = 5;
  int non_pivot_iters = 0;  // 0 -> max_iters / 10
  double mask_coverage = 0.25;
  int workers = 0;  // 0 -> hardware concurrency, capped at 8

  int image_cases = 50;
  int sequence_cases = 10;
  int sequence_length = 10;
  double sequence_drift = 0.05;  // per-frame latent step bound
  int pseudo_cases = 20;
  int pseudo_length = 5;

  void validate() const;
  nlohmann::json to_json() const;
  // Strict parse: unknown keys are rejected.
  static BenchConfig from_json(const nlohmann::json& j);
};

struct ImageCaseResult {
  int index = 0;
  int iters_random = 0;
  int iters_pool = 0;
  double speedup = 0.0;  // iters_random / max(1, iters_pool)
  double psnr_random = 0.0;
  double psnr_pool = 0.0;
  int pool_index = -1;
  double pool_loss = 0.0;
  std::string error;
};

struct ModeStats {
  double eta = 0.0;    // pseudo cases only
  double flicker = 0.0;
  double psnr = 0.0;   // mean per-frame PSNR vs ground truth
};

struct SequenceCaseResult {
  int index = 0;
  double independent_iters_median = 0.0;
  double reuse_pivot_iters_median = 0.0;
  double reuse_nonpivot_iters_median = 0.0;
  double warm_ratio = 0.0;  // nonpivot median / independent median
  ModeStats independent, reuse, group;
  std::string error;
};

struct PseudoCaseResult {
  int index = 0;
  ModeStats independent, reuse, group;
  std::string error;
};

struct BenchReport {
  BenchConfig config;
  std::vector<ImageCaseResult> image_cases;
  std::vector<SequenceCaseResult> sequence_cases;
  std::vector<PseudoCaseResult> pseudo_cases;

  std::string to_csv() const;
  nlohmann::json summary() const;
};

BenchReport run_benchmark(const BenchConfig& config);

// Writes the per-case CSV and the JSON summary. Outputs are byte-identical
// across runs with the same config.
void write_report(const BenchReport& report, const std::string& csv_path,
                  const std::string& json_path);

// Order statistics with linear interpolation between ranks.
double quantile(std::vector<double> values, double q);
inline double median(std::vector<double> values) {
  return quantile(std::move(values), 0.5);
}

}  // namespace zinpaint
