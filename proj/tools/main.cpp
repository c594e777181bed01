#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zinpaint/bench.hpp"
#include "zinpaint/blob.hpp"
#include "zinpaint/gan_trainer.hpp"
#include "zinpaint/image_io.hpp"
#include "zinpaint/metrics.hpp"
#include "zinpaint/mlp.hpp"
#include "zinpaint/pipeline.hpp"

namespace {

using namespace zinpaint;

struct BlobFlag {
  std::string spec;  // "K:H:W:C:sigma_min:sigma_max"

  BlobSpec parse() const {
    BlobSpec s;
    if (std::sscanf(spec.c_str(), "%d:%d:%d:%d:%lf:%lf", &s.blobs, &s.height,
                    &s.width, &s.channels, &s.sigma_min, &s.sigma_max) != 6) {
      throw ValueError("bad blob spec '" + spec +
                       "' (expected K:H:W:C:sigma_min:sigma_max)");
    }
    s.validate();
    return s;
  }
};

std::unique_ptr<Generator> open_generator(const std::string& lgw_path,
                                          const BlobFlag& blob) {
  if (!lgw_path.empty() && !blob.spec.empty()) {
    throw ValueError("give either --generator or --blob-generator, not both");
  }
  if (!lgw_path.empty()) {
    return std::make_unique<MlpGenerator>(MlpGenerator::load(lgw_path));
  }
  if (!blob.spec.empty()) {
    return std::make_unique<BlobGenerator>(blob.parse());
  }
  throw ValueError("a generator is required (--generator or --blob-generator)");
}

std::unique_ptr<Discriminator> open_discriminator(const std::string& lgw_path,
                                                  double lambda) {
  if (lgw_path.empty()) {
    if (lambda > 0.0) {
      throw ValueError("--discriminator is required unless --lambda is 0");
    }
    return nullptr;
  }
  return std::make_unique<MlpDiscriminator>(MlpDiscriminator::load(lgw_path));
}

nlohmann::json inpaint_config_json(const InpaintConfig& config) {
  return {{"lambda", config.weights.lambda},
          {"gamma", config.weights.gamma},
          {"mu", config.weights.mu},
          {"max_iters", config.optim.max_iters},
          {"learning_rate", config.optim.learning_rate},
          {"beta1", config.optim.beta1},
          {"beta2", config.optim.beta2},
          {"eps", config.optim.eps},
          {"clamp_z", config.optim.clamp_z},
          {"seed", config.optim.seed},
          {"init", config.init == InitStrategy::kPool ? "pool" : "random"},
          {"window", config.window},
          {"non_pivot_iters", config.resolved_non_pivot_iters()},
          {"group_iters", config.resolved_group_iters()},
          {"pivot_reinit", config.pivot_reinit}};
}

nlohmann::json frame_report(const InpaintResult& r) {
  nlohmann::json j = {
      {"iterations", r.trajectory.iterations()},
      {"iterations_to_saturation", iterations_to_saturation(r.trajectory)},
      {"initial_objective", r.trajectory.objectives.front()},
      {"final_objective", r.trajectory.objectives.back()},
      {"is_pivot", r.is_pivot},
      {"init",
       {{"strategy",
         r.init.strategy == InitStrategy::kPool ? "pool" : "random"},
        {"pool_index", r.init.pool_index},
        {"matching_loss", r.init.matching_loss}}}};
  return j;
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << j.dump(2) << "\n";
  if (!f) throw IoError("failed writing " + path);
}

std::string frame_file(const std::string& dir, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%04d.png", index);
  return (std::filesystem::path(dir) / buf).string();
}

std::vector<Image> load_frames_only(const std::string& dir) {
  std::vector<Image> frames;
  for (int i = 0;; ++i) {
    const std::string path = frame_file(dir, i);
    if (!std::filesystem::exists(path)) break;
    frames.push_back(load_image(path));
  }
  if (frames.empty()) {
    throw IoError("no frame_0000.png style frames found in " + dir);
  }
  return frames;
}

// Shared inpaint/inpaint-seq options.
struct InpaintCli {
  std::string generator_path;
  BlobFlag blob;
  std::string discriminator_path;
  std::string pool_path;
  std::string init = "";
  double lambda = 0.01;
  double gamma = 0.01;
  double mu = 0.1;
  int iters = 1000;
  double learning_rate = 0.02;
  std::uint64_t seed = 0;
  bool no_clamp = false;
  int window = 5;
  int non_pivot_iters = 0;
  int group_iters = 0;
  bool pivot_reinit = false;

  void add_common(CLI::App* cmd) {
    cmd->add_option("--generator", generator_path, ".lgw generator model");
    cmd->add_option("--blob-generator", blob.spec,
                    "builtin blob generator spec K:H:W:C:sigma_min:sigma_max");
    cmd->add_option("--discriminator", discriminator_path,
                    ".lgw discriminator model (required unless --lambda 0)");
    cmd->add_option("--pool", pool_path, ".lpool initialization pool");
    cmd->add_option("--init", init, "init strategy: random|pool")
        ->check(CLI::IsMember({"random", "pool"}));
    cmd->add_option("--lambda", lambda, "perceptual loss weight");
    cmd->add_option("--gamma", gamma, "structure loss weight");
    cmd->add_option("--mu", mu, "group consistency weight");
    cmd->add_option("--iters", iters, "optimizer iterations");
    cmd->add_option("--lr", learning_rate, "Adam learning rate");
    cmd->add_option("--seed", seed, "run seed");
    cmd->add_flag("--no-clamp", no_clamp, "disable [-1,1] latent projection");
  }

  InpaintConfig build(const Generator& g,
                      std::optional<Pool>& pool_storage) const {
    InpaintConfig config;
    config.weights.lambda = lambda;
    config.weights.gamma = gamma;
    config.weights.mu = mu;
    config.optim.max_iters = iters;
    config.optim.learning_rate = learning_rate;
    config.optim.seed = seed;
    config.optim.clamp_z = !no_clamp;
    config.window = window;
    config.non_pivot_iters = non_pivot_iters;
    config.group_iters = group_iters;
    config.pivot_reinit = pivot_reinit;
    if (!pool_path.empty()) {
      pool_storage.emplace(load_pool(pool_path, g));
      config.pool = &*pool_storage;
    }
    const std::string strategy =
        !init.empty() ? init : (config.pool ? "pool" : "random");
    config.init =
        strategy == "pool" ? InitStrategy::kPool : InitStrategy::kRandom;
    return config;
  }
};

int cmd_train_toy_gan(const TrainConfig& config, const std::string& gen_out,
                      const std::string& disc_out) {
  train_toy_gan(config, gen_out, disc_out);
  std::cout << "wrote " << gen_out << " and " << disc_out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent-search inpainting engine"};
  app.require_subcommand(1);

  // train-toy-gan
  TrainConfig train_config;
  std::string train_gen_out = "generator.lgw";
  std::string train_disc_out = "discriminator.lgw";
  CLI::App* train = app.add_subcommand(
      "train-toy-gan", "train a toy generator/discriminator pair on "
                       "synthetic blob images");
  train->add_option("--out-generator", train_gen_out, "output .lgw path");
  train->add_option("--out-discriminator", train_disc_out, "output .lgw path");
  train->add_option("--steps", train_config.steps, "training steps");
  train->add_option("--batch-size", train_config.batch_size, "batch size");
  train->add_option("--lr-g", train_config.lr_g, "generator learning rate");
  train->add_option("--lr-d", train_config.lr_d, "discriminator learning rate");
  train->add_option("--latent-dim", train_config.latent_dim, "latent dimension");
  train->add_option("--seed", train_config.seed, "training seed");
  train->add_option("--g-hidden", train_config.g_hidden,
                    "generator hidden widths");
  train->add_option("--d-hidden", train_config.d_hidden,
                    "discriminator hidden widths");
  train->add_option("--blobs", train_config.dataset.blobs,
                    "dataset blob count");
  train->add_option("--height", train_config.dataset.height, "image height");
  train->add_option("--width", train_config.dataset.width, "image width");
  train->add_option("--channels", train_config.dataset.channels,
                    "image channels (1 or 3)");
  train->add_option("--sigma-min", train_config.dataset.sigma_min,
                    "min blob radius");
  train->add_option("--sigma-max", train_config.dataset.sigma_max,
                    "max blob radius");

  // build-pool
  std::string pool_generator_path;
  BlobFlag pool_blob;
  int pool_n = 300;
  std::uint64_t pool_seed = 0;
  std::string pool_out = "pool.lpool";
  CLI::App* bp = app.add_subcommand(
      "build-pool", "render a pool of (latent, image) pairs for "
                    "nearest-neighbor initialization");
  bp->add_option("--generator", pool_generator_path, ".lgw generator model");
  bp->add_option("--blob-generator", pool_blob.spec,
                 "builtin blob generator spec K:H:W:C:sigma_min:sigma_max");
  bp->add_option("--n", pool_n, "pool size");
  bp->add_option("--seed", pool_seed, "sampling seed");
  bp->add_option("--out", pool_out, "output .lpool path");

  // inpaint
  InpaintCli single;
  std::string in_image, in_mask, out_image, report_path, trajectory_path;
  CLI::App* ip = app.add_subcommand("inpaint", "inpaint a single masked image");
  ip->add_option("--image", in_image, "input PNG")->required();
  ip->add_option("--mask", in_mask, "mask PNG ({0,255}, 0 = damaged)")
      ->required();
  ip->add_option("--out", out_image, "output PNG")->required();
  ip->add_option("--report", report_path, "JSON run report path");
  ip->add_option("--trajectory", trajectory_path, "objective CSV path");
  single.add_common(ip);

  // inpaint-seq
  InpaintCli seq;
  std::string seq_dir, seq_out_dir, seq_mode = "reuse", seq_report;
  CLI::App* is = app.add_subcommand(
      "inpaint-seq", "inpaint a directory of frame_%04d.png/mask_%04d.png");
  is->add_option("--dir", seq_dir, "input frame directory")->required();
  is->add_option("--out-dir", seq_out_dir, "output directory")->required();
  is->add_option("--mode", seq_mode, "independent|reuse|reuse+group")
      ->check(CLI::IsMember({"independent", "reuse", "reuse+group"}));
  is->add_option("--report", seq_report, "JSON run report path");
  is->add_option("--window", seq.window, "group window W");
  is->add_option("--non-pivot-iters", seq.non_pivot_iters,
                 "warm-start budget (0 = iters/10)");
  is->add_option("--group-iters", seq.group_iters,
                 "group refinement budget (0 = non-pivot budget)");
  is->add_flag("--pivot-reinit", seq.pivot_reinit,
               "re-initialize every pivot instead of reusing the previous one");
  seq.add_common(is);

  // bench
  std::string bench_config_path, bench_csv = "bench.csv",
              bench_json = "bench.json";
  CLI::App* bench = app.add_subcommand(
      "bench", "run the seeded convergence/consistency benchmark");
  bench->add_option("--config", bench_config_path, "JSON bench config");
  bench->add_option("--out-csv", bench_csv, "per-case CSV path");
  bench->add_option("--out-json", bench_json, "JSON summary path");

  // metrics
  std::string m_ref, m_test, m_ref_dir, m_test_dir, m_out;
  CLI::App* metrics = app.add_subcommand(
      "metrics", "compare images or frame directories");
  metrics->add_option("--ref", m_ref, "reference PNG");
  metrics->add_option("--test", m_test, "test PNG");
  metrics->add_option("--ref-dir", m_ref_dir, "reference frame directory");
  metrics->add_option("--test-dir", m_test_dir, "test frame directory");
  metrics->add_option("--out", m_out, "JSON report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      return cmd_train_toy_gan(train_config, train_gen_out, train_disc_out);
    }

    if (bp->parsed()) {
      auto generator = open_generator(pool_generator_path, pool_blob);
      const Pool pool = build_pool(*generator, pool_n, pool_seed);
      save_pool(pool, pool_out);
      std::cout << "wrote " << pool_out << " (" << pool.size() << " entries)\n";
      return 0;
    }

    if (ip->parsed()) {
      auto generator = open_generator(single.generator_path, single.blob);
      auto discriminator =
          open_discriminator(single.discriminator_path, single.lambda);
      std::optional<Pool> pool;
      const InpaintConfig config = single.build(*generator, pool);
      const Image image = load_image(in_image);
      const Mask mask = load_mask(in_mask);
      const InpaintResult result =
          inpaint_image(image, mask, *generator, discriminator.get(), config);
      save_image(result.inpainted, out_image);
      if (!trajectory_path.empty()) {
        write_trajectory_csv(result.trajectory, trajectory_path);
      }
      if (!report_path.empty()) {
        nlohmann::json j = {{"command", "inpaint"},
                            {"image", in_image},
                            {"mask", in_mask},
                            {"output", out_image},
                            {"config", inpaint_config_json(config)},
                            {"result", frame_report(result)}};
        write_json(j, report_path);
      }
      std::cout << "wrote " << out_image << " (saturation at iteration "
                << iterations_to_saturation(result.trajectory) << ")\n";
      return 0;
    }

    if (is->parsed()) {
      auto generator = open_generator(seq.generator_path, seq.blob);
      auto discriminator =
          open_discriminator(seq.discriminator_path, seq.lambda);
      std::optional<Pool> pool;
      const InpaintConfig config = seq.build(*generator, pool);
      const SequenceMode mode = sequence_mode_from_name(seq_mode);
      const auto frames = load_sequence(seq_dir);
      const SequenceResult result = inpaint_sequence(
          frames, *generator, discriminator.get(), config, mode);
      std::filesystem::create_directories(seq_out_dir);
      for (std::size_t t = 0; t < result.frames.size(); ++t) {
        save_image(result.frames[t].inpainted,
                   frame_file(seq_out_dir, static_cast<int>(t)));
      }
      if (!seq_report.empty()) {
        nlohmann::json frames_json = nlohmann::json::array();
        for (const InpaintResult& r : result.frames) {
          frames_json.push_back(frame_report(r));
        }
        nlohmann::json j = {{"command", "inpaint-seq"},
                            {"input_dir", seq_dir},
                            {"output_dir", seq_out_dir},
                            {"mode", sequence_mode_name(mode)},
                            {"config", inpaint_config_json(config)},
                            {"frames", frames_json}};
        write_json(j, seq_report);
      }
      std::cout << "wrote " << result.frames.size() << " frames to "
                << seq_out_dir << "\n";
      return 0;
    }

    if (bench->parsed()) {
      BenchConfig config;
      if (!bench_config_path.empty()) {
        std::ifstream f(bench_config_path);
        if (!f) throw IoError("cannot open " + bench_config_path);
        nlohmann::json j;
        try {
          f >> j;
        } catch (const nlohmann::json::exception& e) {
          throw IoError("bad JSON in " + bench_config_path + ": " + e.what());
        }
        config = BenchConfig::from_json(j);
      }
      const BenchReport report = run_benchmark(config);
      write_report(report, bench_csv, bench_json);
      std::cout << "wrote " << bench_csv << " and " << bench_json << "\n";
      const nlohmann::json summary = report.summary();
      if (summary.contains("image")) {
        std::cout << "image speedup median: "
                  << summary["image"]["speedup"]["median"] << "\n";
      }
      if (summary.contains("sequence")) {
        std::cout << "warm-start ratio median: "
                  << summary["sequence"]["warm_ratio"]["median"] << "\n";
      }
      if (summary.contains("pseudo")) {
        std::cout << "eta means (independent/reuse/group): "
                  << summary["pseudo"]["eta_mean"]["independent"] << " / "
                  << summary["pseudo"]["eta_mean"]["reuse"] << " / "
                  << summary["pseudo"]["eta_mean"]["group"] << "\n";
      }
      return summary["failed_cases"].get<int>() == 0 ? 0 : 1;
    }

    if (metrics->parsed()) {
      nlohmann::json j = {{"command", "metrics"}};
      if (!m_ref.empty() || !m_test.empty()) {
        if (m_ref.empty() || m_test.empty()) {
          throw ValueError("--ref and --test must be given together");
        }
        const Image a = load_image(m_ref);
        const Image b = load_image(m_test);
        j["psnr"] = psnr(a, b);
        j["ms_ssim"] = ms_ssim(a, b);
        std::cout << "psnr: " << j["psnr"] << " dB\nms_ssim: " << j["ms_ssim"]
                  << "\n";
      } else if (!m_ref_dir.empty() || !m_test_dir.empty()) {
        if (m_test_dir.empty()) {
          throw ValueError("--test-dir is required with --ref-dir");
        }
        const std::vector<Image> test = load_frames_only(m_test_dir);
        j["eta"] = temporal_consistency_eta(test);
        j["flicker"] = flicker(test);
        if (!m_ref_dir.empty()) {
          const std::vector<Image> ref = load_frames_only(m_ref_dir);
          if (ref.size() != test.size()) {
            throw ValueError("frame counts differ between --ref-dir and --test-dir");
          }
          nlohmann::json per_frame = nlohmann::json::array();
          double mean_psnr = 0.0, mean_ssim = 0.0;
          for (std::size_t t = 0; t < test.size(); ++t) {
            const double p = psnr(ref[t], test[t]);
            const double s = ms_ssim(ref[t], test[t]);
            per_frame.push_back({{"frame", t}, {"psnr", p}, {"ms_ssim", s}});
            mean_psnr += p;
            mean_ssim += s;
          }
          j["per_frame"] = per_frame;
          j["psnr_mean"] = mean_psnr / static_cast<double>(test.size());
          j["ms_ssim_mean"] = mean_ssim / static_cast<double>(test.size());
          std::cout << "psnr mean: " << j["psnr_mean"] << " dB\nms_ssim mean: "
                    << j["ms_ssim_mean"] << "\n";
        }
        std::cout << "eta: " << j["eta"] << " dB\nflicker: " << j["flicker"]
                  << "\n";
      } else {
        throw ValueError("give --ref/--test or --ref-dir/--test-dir");
      }
      if (!m_out.empty()) write_json(j, m_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
