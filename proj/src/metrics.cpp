#include "zinpaint/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace zinpaint {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kMsSsimWeights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;
constexpr double kRange = 2.0;  // [-1, 1]

struct Plane {
  int h = 0, w = 0;
  std::vector<double> v;
  double at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

Plane channel_plane(const Image& img, int c) {
  Plane p;
  p.h = img.height();
  p.w = img.width();
  p.v.resize(static_cast<std::size_t>(p.h) * p.w);
  for (int y = 0; y < p.h; ++y) {
    for (int x = 0; x < p.w; ++x) {
      p.v[static_cast<std::size_t>(y) * p.w + x] = img.at(y, x, c);
    }
  }
  return p;
}

Plane downsample2(const Plane& p) {
  Plane q;
  q.h = p.h / 2;
  q.w = p.w / 2;
  q.v.resize(static_cast<std::size_t>(q.h) * q.w);
  for (int y = 0; y < q.h; ++y) {
    for (int x = 0; x < q.w; ++x) {
      q.v[static_cast<std::size_t>(y) * q.w + x] =
          0.25 * (p.at(2 * y, 2 * x) + p.at(2 * y, 2 * x + 1) +
                  p.at(2 * y + 1, 2 * x) + p.at(2 * y + 1, 2 * x + 1));
    }
  }
  return q;
}

const std::vector<double>& gaussian_taps() {
  static const std::vector<double> taps = [] {
    std::vector<double> t(kWindow);
    const int half = kWindow / 2;
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
      const double d = i - half;
      t[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSigma * kSigma));
      sum += t[static_cast<std::size_t>(i)];
    }
    for (double& x : t) x /= sum;
    return t;
  }();
  return taps;
}

// Mean luminance / contrast-structure SSIM terms for one scale.
struct ScaleScore {
  double luminance = 0.0;
  double contrast_structure = 0.0;
};

ScaleScore ssim_scale(const Plane& a, const Plane& b) {
  const double c1 = (kK1 * kRange) * (kK1 * kRange);
  const double c2 = (kK2 * kRange) * (kK2 * kRange);
  const auto& taps = gaussian_taps();
  const int half = kWindow / 2;
  const int h = a.h, w = a.w;

  ScaleScore score;
  double count = 0.0;
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - half);
    const int y1 = std::min(h - 1, y + half);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - half);
      const int x1 = std::min(w - 1, x + half);
      double wsum = 0.0, ma = 0.0, mb = 0.0;
      for (int yy = y0; yy <= y1; ++yy) {
        const double wy = taps[static_cast<std::size_t>(yy - y + half)];
        for (int xx = x0; xx <= x1; ++xx) {
          const double wt = wy * taps[static_cast<std::size_t>(xx - x + half)];
          wsum += wt;
          ma += wt * a.at(yy, xx);
          mb += wt * b.at(yy, xx);
        }
      }
      ma /= wsum;
      mb /= wsum;
      double va = 0.0, vb = 0.0, cov = 0.0;
      for (int yy = y0; yy <= y1; ++yy) {
        const double wy = taps[static_cast<std::size_t>(yy - y + half)];
        for (int xx = x0; xx <= x1; ++xx) {
          const double wt = wy * taps[static_cast<std::size_t>(xx - x + half)] / wsum;
          const double da = a.at(yy, xx) - ma;
          const double db = b.at(yy, xx) - mb;
          va += wt * da * da;
          vb += wt * db * db;
          cov += wt * da * db;
        }
      }
      score.luminance += (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
      score.contrast_structure += (2.0 * cov + c2) / (va + vb + c2);
      count += 1.0;
    }
  }
  score.luminance /= count;
  score.contrast_structure /= count;
  return score;
}

int ms_ssim_scales(int min_dim) {
  int scales = 0;
  while (scales < 5 && (min_dim >> scales) >= 2) ++scales;
  return scales;
}

double mean_abs_diff(const Image& a, const Image& b) {
  check_same_shape(a, b, "frame difference");
  double total = 0.0;
  const double* pa = a.data();
  const double* pb = b.data();
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(pa[i] - pb[i]);
  return total / static_cast<double>(a.size());
}

}  // namespace

double psnr(const Image& a, const Image& b, double peak, double cap) {
  check_same_shape(a, b, "psnr");
  if (!(peak > 0.0) || !(cap > 0.0)) {
    throw ValueError("psnr peak and cap must be positive");
  }
  double mse = 0.0;
  const double* pa = a.data();
  const double* pb = b.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = pa[i] - pb[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse < peak * peak * std::pow(10.0, -cap / 10.0)) return cap;
  return 10.0 * std::log10(peak * peak / mse);
}

double ms_ssim(const Image& a, const Image& b) {
  check_same_shape(a, b, "ms_ssim");
  const int scales = ms_ssim_scales(std::min(a.height(), a.width()));
  if (scales < 1) {
    throw ShapeError("ms_ssim requires at least 2 pixels per side");
  }
  double wsum = 0.0;
  for (int s = 0; s < scales; ++s) wsum += kMsSsimWeights[s];

  double result = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    Plane pa = channel_plane(a, c);
    Plane pb = channel_plane(b, c);
    double channel = 1.0;
    for (int s = 0; s < scales; ++s) {
      const ScaleScore score = ssim_scale(pa, pb);
      const double weight = kMsSsimWeights[s] / wsum;
      channel *= std::pow(std::max(0.0, score.contrast_structure), weight);
      if (s == scales - 1) {
        channel *= std::pow(std::max(0.0, score.luminance), weight);
      } else {
        pa = downsample2(pa);
        pb = downsample2(pb);
      }
    }
    result += channel;
  }
  result /= a.channels();
  return std::clamp(result, 0.0, 1.0);
}

double temporal_consistency_eta(const std::vector<Image>& frames) {
  if (frames.size() < 2) {
    throw ValueError("temporal consistency needs at least 2 frames");
  }
  double total = 0.0;
  double pairs = 0.0;
  for (std::size_t j = 0; j < frames.size(); ++j) {
    for (std::size_t k = j + 1; k < frames.size(); ++k) {
      total += psnr(frames[j], frames[k]);
      pairs += 1.0;
    }
  }
  return total / pairs;
}

double flicker(const std::vector<Image>& frames) {
  if (frames.size() < 2) throw ValueError("flicker needs at least 2 frames");
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < frames.size(); ++t) {
    total += mean_abs_diff(frames[t], frames[t + 1]);
  }
  return total / static_cast<double>(frames.size() - 1);
}

void MaskBlockSpec::validate() const {
  if (!(coverage > 0.0 && coverage < 1.0)) {
    throw ValueError("mask coverage must lie in (0, 1)");
  }
}

Mask random_block_mask(int height, int width, const MaskBlockSpec& spec,
                       Rng& rng) {
  spec.validate();
  if (height < 2 || width < 2) {
    throw ShapeError("block mask needs at least 2x2 pixels");
  }
  const double area = spec.coverage * height * width;
  // Mild aspect jitter keeps each draw's coverage within ~2% of the target.
  const double side = std::sqrt(area) * rng.uniform(0.85, 1.18);
  int bh = std::clamp(static_cast<int>(std::lround(side)), 1, height);
  int bw = std::clamp(static_cast<int>(std::lround(area / bh)), 1, width);
  if (bh == height && bw == width) bw = width - 1;  // keep one unmasked pixel
  const int y0 = static_cast<int>(rng.uniform_int(
      static_cast<std::uint64_t>(height - bh + 1)));
  const int x0 = static_cast<int>(rng.uniform_int(
      static_cast<std::uint64_t>(width - bw + 1)));
  std::vector<std::uint8_t> data(static_cast<std::size_t>(height) * width, 1);
  for (int y = y0; y < y0 + bh; ++y) {
    for (int x = x0; x < x0 + bw; ++x) {
      data[static_cast<std::size_t>(y) * width + x] = 0;
    }
  }
  return Mask(height, width, std::move(data));
}

PseudoSequence make_pseudo_sequence(const Image& base, int s,
                                    const MaskBlockSpec& spec,
                                    std::uint64_t seed) {
  if (s < 2) throw ValueError("pseudo sequence length must be >= 2");
  Rng rng(seed);
  PseudoSequence seq;
  seq.base = base;
  seq.masks.reserve(static_cast<std::size_t>(s));
  int attempts = 0;
  while (static_cast<int>(seq.masks.size()) < s) {
    if (++attempts > 10000) {
      throw ValueError("cannot generate " + std::to_string(s) +
                       " distinct masks for this image size");
    }
    Mask candidate = random_block_mask(base.height(), base.width(), spec, rng);
    bool duplicate = false;
    for (const Mask& m : seq.masks) {
      if (m.values() == candidate.values()) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) seq.masks.push_back(std::move(candidate));
  }
  return seq;
}

}  // namespace zinpaint
