#include "zinpaint/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <thread>

#include "zinpaint/metrics.hpp"
#include "zinpaint/mlp.hpp"
#include "zinpaint/pipeline.hpp"

namespace zinpaint {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Deterministic bounded-worker map: results land by index.
void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  int n = workers;
  if (n <= 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
    n = std::clamp(n, 1, 8);
  }
  n = std::min(n, count);
  if (n == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n));
  for (int w = 0; w < n; ++w) {
    threads.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (std::thread& t : threads) t.join();
}

Latent drift_step(const Latent& z, double drift, Rng& rng) {
  Latent out = z;
  for (double& v : out.values) {
    v = std::clamp(v + drift * rng.uniform(-1.0, 1.0), -1.0, 1.0);
  }
  return out;
}

double mean_frame_psnr(const std::vector<InpaintResult>& results,
                       const std::vector<Image>& truth) {
  double total = 0.0;
  for (std::size_t t = 0; t < results.size(); ++t) {
    total += psnr(results[t].inpainted, truth[t]);
  }
  return total / static_cast<double>(results.size());
}

std::vector<Image> inpainted_frames(const std::vector<InpaintResult>& results) {
  std::vector<Image> out;
  out.reserve(results.size());
  for (const InpaintResult& r : results) out.push_back(r.inpainted);
  return out;
}

struct BenchContext {
  const BenchConfig& config;
  BlobGenerator generator;
  MlpDiscriminator discriminator;
  Pool pool;

  explicit BenchContext(const BenchConfig& cfg)
      : config(cfg),
        generator(cfg.generator),
        discriminator(
            make_random_mlp(static_cast<int>(generator.output_shape().count()),
                            cfg.d_hidden, 1, Activation::kSigmoid,
                            Rng::derive(cfg.seed, 0xD15C)),
            generator.output_shape()),
        pool(build_pool(generator, cfg.pool_size, Rng::derive(cfg.seed, 0x9001))) {}

  InpaintConfig inpaint_config(InitStrategy init, std::uint64_t seed) const {
    InpaintConfig c;
    c.weights = config.weights;
    c.optim = config.optim;
    c.optim.seed = seed;
    c.init = init;
    c.pool = init == InitStrategy::kPool ? &pool : nullptr;
    c.window = config.window;
    c.non_pivot_iters = config.non_pivot_iters;
    return c;
  }
};

ImageCaseResult run_image_case(const BenchContext& ctx, int index) {
  ImageCaseResult result;
  result.index = index;
  const std::uint64_t case_seed =
      Rng::derive(ctx.config.seed, 0x100000ULL + static_cast<std::uint64_t>(index));
  Rng rng(case_seed);

  const Latent z_true = sample_latent(rng, ctx.generator.latent_dim());
  const Image truth = ctx.generator.forward(z_true);
  const Mask mask = random_block_mask(truth.height(), truth.width(),
                                      {ctx.config.mask_coverage}, rng);

  const InpaintResult random_run = inpaint_image(
      truth, mask, ctx.generator, &ctx.discriminator,
      ctx.inpaint_config(InitStrategy::kRandom, Rng::derive(case_seed, 1)));
  const InpaintResult pool_run = inpaint_image(
      truth, mask, ctx.generator, &ctx.discriminator,
      ctx.inpaint_config(InitStrategy::kPool, Rng::derive(case_seed, 2)));

  result.iters_random = iterations_to_saturation(random_run.trajectory);
  result.iters_pool = iterations_to_saturation(pool_run.trajectory);
  result.speedup = static_cast<double>(result.iters_random) /
                   static_cast<double>(std::max(1, result.iters_pool));
  result.psnr_random = psnr(random_run.inpainted, truth);
  result.psnr_pool = psnr(pool_run.inpainted, truth);
  result.pool_index = pool_run.init.pool_index;
  result.pool_loss = pool_run.init.matching_loss;
  return result;
}

SequenceCaseResult run_sequence_case(const BenchContext& ctx, int index) {
  SequenceCaseResult result;
  result.index = index;
  const std::uint64_t case_seed =
      Rng::derive(ctx.config.seed, 0x200000ULL + static_cast<std::uint64_t>(index));
  Rng rng(case_seed);

  std::vector<Image> truth;
  std::vector<std::pair<Image, Mask>> frames;
  Latent z = sample_latent(rng, ctx.generator.latent_dim());
  for (int t = 0; t < ctx.config.sequence_length; ++t) {
    if (t > 0) z = drift_step(z, ctx.config.sequence_drift, rng);
    Image image = ctx.generator.forward(z);
    Mask mask = random_block_mask(image.height(), image.width(),
                                  {ctx.config.mask_coverage}, rng);
    truth.push_back(image);
    frames.emplace_back(std::move(image), std::move(mask));
  }

  const SequenceResult independent = inpaint_sequence(
      frames, ctx.generator, &ctx.discriminator,
      ctx.inpaint_config(InitStrategy::kRandom, Rng::derive(case_seed, 1)),
      SequenceMode::kIndependent);
  const SequenceResult reuse = inpaint_sequence(
      frames, ctx.generator, &ctx.discriminator,
      ctx.inpaint_config(InitStrategy::kPool, Rng::derive(case_seed, 2)),
      SequenceMode::kReuse);
  const SequenceResult group = inpaint_sequence(
      frames, ctx.generator, &ctx.discriminator,
      ctx.inpaint_config(InitStrategy::kPool, Rng::derive(case_seed, 2)),
      SequenceMode::kReuseGroup);

  std::vector<double> ind_iters, pivot_iters, nonpivot_iters;
  for (const InpaintResult& r : independent.frames) {
    ind_iters.push_back(iterations_to_saturation(r.trajectory));
  }
  for (const InpaintResult& r : reuse.frames) {
    (r.is_pivot ? pivot_iters : nonpivot_iters)
        .push_back(iterations_to_saturation(r.trajectory));
  }
  result.independent_iters_median = median(ind_iters);
  result.reuse_pivot_iters_median = median(pivot_iters);
  result.reuse_nonpivot_iters_median =
      nonpivot_iters.empty() ? 0.0 : median(nonpivot_iters);
  result.warm_ratio = result.reuse_nonpivot_iters_median /
                      std::max(1.0, result.independent_iters_median);

  result.independent = ModeStats{0.0, flicker(inpainted_frames(independent.frames)),
                                 mean_frame_psnr(independent.frames, truth)};
  result.reuse = ModeStats{0.0, flicker(inpainted_frames(reuse.frames)),
                           mean_frame_psnr(reuse.frames, truth)};
  result.group = ModeStats{0.0, flicker(inpainted_frames(group.frames)),
                           mean_frame_psnr(group.frames, truth)};
  return result;
}

PseudoCaseResult run_pseudo_case(const BenchContext& ctx, int index) {
  PseudoCaseResult result;
  result.index = index;
  const std::uint64_t case_seed =
      Rng::derive(ctx.config.seed, 0x300000ULL + static_cast<std::uint64_t>(index));
  Rng rng(case_seed);

  const Latent z_true = sample_latent(rng, ctx.generator.latent_dim());
  const Image base = ctx.generator.forward(z_true);
  const PseudoSequence pseudo = make_pseudo_sequence(
      base, ctx.config.pseudo_length, {ctx.config.mask_coverage},
      Rng::derive(case_seed, 3));

  std::vector<std::pair<Image, Mask>> frames;
  std::vector<Image> truth(pseudo.masks.size(), base);
  for (const Mask& mask : pseudo.masks) frames.emplace_back(base, mask);

  const auto evaluate = [&](SequenceMode mode, InitStrategy init,
                            std::uint64_t stream) {
    const SequenceResult run = inpaint_sequence(
        frames, ctx.generator, &ctx.discriminator,
        ctx.inpaint_config(init, Rng::derive(case_seed, stream)), mode);
    const std::vector<Image> outputs = inpainted_frames(run.frames);
    return ModeStats{temporal_consistency_eta(outputs), flicker(outputs),
                     mean_frame_psnr(run.frames, truth)};
  };
  result.independent =
      evaluate(SequenceMode::kIndependent, InitStrategy::kRandom, 1);
  result.reuse = evaluate(SequenceMode::kReuse, InitStrategy::kPool, 2);
  result.group = evaluate(SequenceMode::kReuseGroup, InitStrategy::kPool, 2);
  return result;
}

template <typename T>
std::vector<double> collect(const std::vector<T>& cases,
                            double (*pick)(const T&)) {
  std::vector<double> out;
  for (const T& c : cases) {
    if (c.error.empty()) out.push_back(pick(c));
  }
  return out;
}

nlohmann::json quartile_block(std::vector<double> values) {
  if (values.empty()) return nullptr;
  return {{"median", quantile(values, 0.5)},
          {"q1", quantile(values, 0.25)},
          {"q3", quantile(values, 0.75)}};
}

struct PairedStats {
  double mean = 0.0;
  double stddev = 0.0;
  double t_stat = 0.0;
  int n = 0;
};

PairedStats paired_stats(const std::vector<double>& diffs) {
  PairedStats s;
  s.n = static_cast<int>(diffs.size());
  if (s.n == 0) return s;
  for (double d : diffs) s.mean += d;
  s.mean /= s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double d : diffs) ss += (d - s.mean) * (d - s.mean);
    s.stddev = std::sqrt(ss / (s.n - 1));
    s.t_stat = s.stddev > 0.0 ? s.mean / (s.stddev / std::sqrt(s.n))
                              : (s.mean > 0.0 ? 1e9 : 0.0);
  }
  return s;
}

nlohmann::json paired_block(const PairedStats& s) {
  return {{"mean", s.mean}, {"stddev", s.stddev}, {"t_stat", s.t_stat},
          {"n", s.n}};
}

}  // namespace

void BenchConfig::validate() const {
  generator.validate();
  weights.validate();
  optim.validate();
  if (pool_size < 1) throw ValueError("pool_size must be >= 1");
  if (window < 1) throw ValueError("window must be >= 1");
  if (non_pivot_iters < 0) throw ValueError("non_pivot_iters must be >= 0");
  if (!(mask_coverage > 0.0 && mask_coverage < 1.0)) {
    throw ValueError("mask_coverage must lie in (0, 1)");
  }
  if (image_cases < 0 || sequence_cases < 0 || pseudo_cases < 0) {
    throw ValueError("case counts must be >= 0");
  }
  if (sequence_cases > 0 && sequence_length < 1) {
    throw ValueError("sequence_length must be >= 1");
  }
  if (pseudo_cases > 0 && pseudo_length < 2) {
    throw ValueError("pseudo_length must be >= 2");
  }
  if (!(sequence_drift >= 0.0)) throw ValueError("sequence_drift must be >= 0");
  if (workers < 0) throw ValueError("workers must be >= 0");
}

nlohmann::json BenchConfig::to_json() const {
  return {
      {"generator",
       {{"blobs", generator.blobs},
        {"height", generator.height},
        {"width", generator.width},
        {"channels", generator.channels},
        {"sigma_min", generator.sigma_min},
        {"sigma_max", generator.sigma_max}}},
      {"d_hidden", d_hidden},
      {"seed", seed},
      {"pool_size", pool_size},
      {"weights",
       {{"lambda", weights.lambda}, {"gamma", weights.gamma}, {"mu", weights.mu}}},
      {"optim",
       {{"max_iters", optim.max_iters},
        {"learning_rate", optim.learning_rate},
        {"beta1", optim.beta1},
        {"beta2", optim.beta2},
        {"eps", optim.eps},
        {"clamp_z", optim.clamp_z}}},
      {"window", window},
      {"non_pivot_iters", non_pivot_iters},
      {"mask_coverage", mask_coverage},
      {"workers", workers},
      {"image_cases", image_cases},
      {"sequence_cases", sequence_cases},
      {"sequence_length", sequence_length},
      {"sequence_drift", sequence_drift},
      {"pseudo_cases", pseudo_cases},
      {"pseudo_length", pseudo_length}};
}

BenchConfig BenchConfig::from_json(const nlohmann::json& j) {
  BenchConfig c;
  const nlohmann::json defaults = c.to_json();

  // Strict key checking, one level deep per sub-object.
  const auto check_keys = [](const nlohmann::json& obj,
                             const nlohmann::json& reference,
                             const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
      if (!reference.contains(key)) {
        throw ValueError("unknown config key '" + where + key + "'");
      }
      (void)value;
    }
  };
  check_keys(j, defaults, "");
  const auto merge = [&](const char* key) {
    nlohmann::json block = defaults.at(key);
    if (j.contains(key)) {
      check_keys(j.at(key), block, std::string(key) + ".");
      block.update(j.at(key));
    }
    return block;
  };

  try {
    const nlohmann::json gen = merge("generator");
    c.generator.blobs = gen.at("blobs").get<int>();
    c.generator.height = gen.at("height").get<int>();
    c.generator.width = gen.at("width").get<int>();
    c.generator.channels = gen.at("channels").get<int>();
    c.generator.sigma_min = gen.at("sigma_min").get<double>();
    c.generator.sigma_max = gen.at("sigma_max").get<double>();

    const nlohmann::json w = merge("weights");
    c.weights.lambda = w.at("lambda").get<double>();
    c.weights.gamma = w.at("gamma").get<double>();
    c.weights.mu = w.at("mu").get<double>();

    const nlohmann::json o = merge("optim");
    c.optim.max_iters = o.at("max_iters").get<int>();
    c.optim.learning_rate = o.at("learning_rate").get<double>();
    c.optim.beta1 = o.at("beta1").get<double>();
    c.optim.beta2 = o.at("beta2").get<double>();
    c.optim.eps = o.at("eps").get<double>();
    c.optim.clamp_z = o.at("clamp_z").get<bool>();

    c.d_hidden = j.value("d_hidden", c.d_hidden);
    c.seed = j.value("seed", c.seed);
    c.pool_size = j.value("pool_size", c.pool_size);
    c.window = j.value("window", c.window);
    c.non_pivot_iters = j.value("non_pivot_iters", c.non_pivot_iters);
    c.mask_coverage = j.value("mask_coverage", c.mask_coverage);
    c.workers = j.value("workers", c.workers);
    c.image_cases = j.value("image_cases", c.image_cases);
    c.sequence_cases = j.value("sequence_cases", c.sequence_cases);
    c.sequence_length = j.value("sequence_length", c.sequence_length);
    c.sequence_drift = j.value("sequence_drift", c.sequence_drift);
    c.pseudo_cases = j.value("pseudo_cases", c.pseudo_cases);
    c.pseudo_length = j.value("pseudo_length", c.pseudo_length);
  } catch (const nlohmann::json::exception& e) {
    throw ValueError(std::string("bad bench config: ") + e.what());
  }
  c.validate();
  return c;
}

BenchReport run_benchmark(const BenchConfig& config) {
  config.validate();
  BenchContext ctx(config);

  BenchReport report;
  report.config = config;
  report.image_cases.resize(static_cast<std::size_t>(config.image_cases));
  report.sequence_cases.resize(static_cast<std::size_t>(config.sequence_cases));
  report.pseudo_cases.resize(static_cast<std::size_t>(config.pseudo_cases));

  // One failed case records its error and leaves the rest of the batch alone.
  parallel_for(config.image_cases, config.workers, [&](int i) {
    try {
      report.image_cases[static_cast<std::size_t>(i)] = run_image_case(ctx, i);
    } catch (const std::exception& e) {
      report.image_cases[static_cast<std::size_t>(i)].index = i;
      report.image_cases[static_cast<std::size_t>(i)].error = e.what();
    }
  });
  parallel_for(config.sequence_cases, config.workers, [&](int i) {
    try {
      report.sequence_cases[static_cast<std::size_t>(i)] =
          run_sequence_case(ctx, i);
    } catch (const std::exception& e) {
      report.sequence_cases[static_cast<std::size_t>(i)].index = i;
      report.sequence_cases[static_cast<std::size_t>(i)].error = e.what();
    }
  });
  parallel_for(config.pseudo_cases, config.workers, [&](int i) {
    try {
      report.pseudo_cases[static_cast<std::size_t>(i)] = run_pseudo_case(ctx, i);
    } catch (const std::exception& e) {
      report.pseudo_cases[static_cast<std::size_t>(i)].index = i;
      report.pseudo_cases[static_cast<std::size_t>(i)].error = e.what();
    }
  });
  return report;
}

std::string BenchReport::to_csv() const {
  std::string out =
      "kind,index,iters_random,iters_pool,speedup,psnr_random,psnr_pool,"
      "pool_index,pool_loss,independent_iters_median,reuse_pivot_iters_median,"
      "reuse_nonpivot_iters_median,warm_ratio,eta_independent,eta_reuse,"
      "eta_group,flicker_independent,flicker_reuse,flicker_group,"
      "psnr_independent,psnr_reuse,psnr_group,error\n";
  for (const ImageCaseResult& c : image_cases) {
    out += "image," + std::to_string(c.index) + ",";
    if (c.error.empty()) {
      out += std::to_string(c.iters_random) + "," + std::to_string(c.iters_pool) +
             "," + fmt(c.speedup) + "," + fmt(c.psnr_random) + "," +
             fmt(c.psnr_pool) + "," + std::to_string(c.pool_index) + "," +
             fmt(c.pool_loss);
    } else {
      out += ",,,,,,";
    }
    out += ",,,,,,,,,,,,," + c.error + "\n";
  }
  for (const SequenceCaseResult& c : sequence_cases) {
    out += "sequence," + std::to_string(c.index) + ",,,,,,,,";
    if (c.error.empty()) {
      out += fmt(c.independent_iters_median) + "," +
             fmt(c.reuse_pivot_iters_median) + "," +
             fmt(c.reuse_nonpivot_iters_median) + "," + fmt(c.warm_ratio) +
             ",,,," + fmt(c.independent.flicker) + "," + fmt(c.reuse.flicker) +
             "," + fmt(c.group.flicker) + "," + fmt(c.independent.psnr) + "," +
             fmt(c.reuse.psnr) + "," + fmt(c.group.psnr);
    } else {
      out += ",,,,,,,,,,,,";
    }
    out += "," + c.error + "\n";
  }
  for (const PseudoCaseResult& c : pseudo_cases) {
    out += "pseudo," + std::to_string(c.index) + ",,,,,,,,,,,,";
    if (c.error.empty()) {
      out += fmt(c.independent.eta) + "," + fmt(c.reuse.eta) + "," +
             fmt(c.group.eta) + "," + fmt(c.independent.flicker) + "," +
             fmt(c.reuse.flicker) + "," + fmt(c.group.flicker) + "," +
             fmt(c.independent.psnr) + "," + fmt(c.reuse.psnr) + "," +
             fmt(c.group.psnr);
    } else {
      out += ",,,,,,,,";
    }
    out += "," + c.error + "\n";
  }
  return out;
}

nlohmann::json BenchReport::summary() const {
  nlohmann::json j;
  j["config"] = config.to_json();

  int errors = 0;
  for (const auto& c : image_cases) errors += !c.error.empty();
  for (const auto& c : sequence_cases) errors += !c.error.empty();
  for (const auto& c : pseudo_cases) errors += !c.error.empty();
  j["failed_cases"] = errors;

  if (!image_cases.empty()) {
    j["image"] = {
        {"cases", image_cases.size()},
        {"speedup", quartile_block(collect<ImageCaseResult>(
                        image_cases,
                        [](const ImageCaseResult& c) { return c.speedup; }))},
        {"iters_random",
         quartile_block(collect<ImageCaseResult>(
             image_cases,
             [](const ImageCaseResult& c) {
               return static_cast<double>(c.iters_random);
             }))},
        {"iters_pool", quartile_block(collect<ImageCaseResult>(
                           image_cases, [](const ImageCaseResult& c) {
                             return static_cast<double>(c.iters_pool);
                           }))}};
  }
  if (!sequence_cases.empty()) {
    j["sequence"] = {
        {"cases", sequence_cases.size()},
        {"independent_iters",
         quartile_block(collect<SequenceCaseResult>(
             sequence_cases, [](const SequenceCaseResult& c) {
               return c.independent_iters_median;
             }))},
        {"reuse_nonpivot_iters",
         quartile_block(collect<SequenceCaseResult>(
             sequence_cases, [](const SequenceCaseResult& c) {
               return c.reuse_nonpivot_iters_median;
             }))},
        {"warm_ratio", quartile_block(collect<SequenceCaseResult>(
                           sequence_cases, [](const SequenceCaseResult& c) {
                             return c.warm_ratio;
                           }))}};
  }
  if (!pseudo_cases.empty()) {
    std::vector<double> eta_ind, eta_reuse, eta_group, d_group_ind, d_group_reuse,
        d_reuse_ind;
    for (const PseudoCaseResult& c : pseudo_cases) {
      if (!c.error.empty()) continue;
      eta_ind.push_back(c.independent.eta);
      eta_reuse.push_back(c.reuse.eta);
      eta_group.push_back(c.group.eta);
      d_group_ind.push_back(c.group.eta - c.independent.eta);
      d_group_reuse.push_back(c.group.eta - c.reuse.eta);
      d_reuse_ind.push_back(c.reuse.eta - c.independent.eta);
    }
    const auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    j["pseudo"] = {
        {"cases", pseudo_cases.size()},
        {"eta_mean",
         {{"independent", mean(eta_ind)},
          {"reuse", mean(eta_reuse)},
          {"group", mean(eta_group)}}},
        {"eta_group_minus_independent", paired_block(paired_stats(d_group_ind))},
        {"eta_group_minus_reuse", paired_block(paired_stats(d_group_reuse))},
        {"eta_reuse_minus_independent", paired_block(paired_stats(d_reuse_ind))}};
  }
  return j;
}

void write_report(const BenchReport& report, const std::string& csv_path,
                  const std::string& json_path) {
  if (!csv_path.empty()) {
    std::ofstream f(csv_path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + csv_path + " for writing");
    f << report.to_csv();
    if (!f) throw IoError("failed writing " + csv_path);
  }
  if (!json_path.empty()) {
    std::ofstream f(json_path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + json_path + " for writing");
    f << report.summary().dump(2) << "\n";
    if (!f) throw IoError("failed writing " + json_path);
  }
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValueError("quantile of empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw ValueError("quantile q must lie in [0,1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace zinpaint
