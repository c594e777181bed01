#include "zinpaint/blob.hpp"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

namespace zinpaint {

namespace {

struct DecodedBlob {
  double cx, cy, sigma;
};

void check_latent(const BlobSpec& spec, const Latent& z, const char* what) {
  if (z.dim() != spec.latent_dim()) {
    throw ShapeError(std::string(what) + ": latent length " +
                     std::to_string(z.dim()) + " does not match spec dim " +
                     std::to_string(spec.latent_dim()));
  }
}

}  // namespace

void BlobSpec::validate() const {
  if (blobs < 1) throw ValueError("blob count must be >= 1");
  if (height < 1 || width < 1) throw ShapeError("blob raster must be nonempty");
  if (channels != 1 && channels != 3) {
    throw ShapeError("blob channels must be 1 or 3");
  }
  if (!(sigma_min > 0.0)) throw ValueError("sigma_min must be > 0");
  if (!(sigma_max > sigma_min)) {
    throw ValueError("sigma_max must exceed sigma_min");
  }
}

BlobGenerator::BlobGenerator(const BlobSpec& spec) : spec_(spec) {
  spec_.validate();
}

Image BlobGenerator::forward(const Latent& z) const {
  check_latent(spec_, z, "blob_forward");
  const int kStride = 3 + spec_.channels;
  const int h = spec_.height, w = spec_.width, ch = spec_.channels;

  std::vector<DecodedBlob> blobs(spec_.blobs);
  for (int k = 0; k < spec_.blobs; ++k) {
    const double* b = z.values.data() + static_cast<std::size_t>(k) * kStride;
    blobs[k].cx = (b[0] + 1.0) * 0.5 * (w - 1);
    blobs[k].cy = (b[1] + 1.0) * 0.5 * (h - 1);
    blobs[k].sigma =
        spec_.sigma_min + (b[2] + 1.0) * 0.5 * (spec_.sigma_max - spec_.sigma_min);
  }

  Image out(h, w, ch);
  std::vector<double> acc(static_cast<std::size_t>(ch));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) acc[static_cast<std::size_t>(c)] = 0.0;
      for (int k = 0; k < spec_.blobs; ++k) {
        const DecodedBlob& bl = blobs[static_cast<std::size_t>(k)];
        const double dx = x - bl.cx;
        const double dy = y - bl.cy;
        const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * bl.sigma * bl.sigma));
        const double* amp =
            z.values.data() + static_cast<std::size_t>(k) * kStride + 3;
        for (int c = 0; c < ch; ++c) acc[static_cast<std::size_t>(c)] += amp[c] * g;
      }
      for (int c = 0; c < ch; ++c) {
        out.at(y, x, c) = std::tanh(acc[static_cast<std::size_t>(c)]);
      }
    }
  }
  return out;
}

Latent BlobGenerator::vjp(const Latent& z, const Image& cotangent) const {
  check_latent(spec_, z, "blob_vjp");
  if (cotangent.height() != spec_.height || cotangent.width() != spec_.width ||
      cotangent.channels() != spec_.channels) {
    throw ShapeError("blob_vjp: cotangent shape does not match output shape");
  }
  const int kStride = 3 + spec_.channels;
  const int h = spec_.height, w = spec_.width, ch = spec_.channels;
  const double dcx_dz = 0.5 * (w - 1);
  const double dcy_dz = 0.5 * (h - 1);
  const double dsig_dz = 0.5 * (spec_.sigma_max - spec_.sigma_min);

  std::vector<DecodedBlob> blobs(spec_.blobs);
  for (int k = 0; k < spec_.blobs; ++k) {
    const double* b = z.values.data() + static_cast<std::size_t>(k) * kStride;
    blobs[k].cx = (b[0] + 1.0) * 0.5 * (w - 1);
    blobs[k].cy = (b[1] + 1.0) * 0.5 * (h - 1);
    blobs[k].sigma =
        spec_.sigma_min + (b[2] + 1.0) * 0.5 * (spec_.sigma_max - spec_.sigma_min);
  }

  Latent grad = Latent::zeros(spec_.latent_dim());
  std::vector<double> gk(static_cast<std::size_t>(spec_.blobs));
  std::vector<double> r2k(static_cast<std::size_t>(spec_.blobs));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s_pix = 0.0;  // reused per channel below
      for (int k = 0; k < spec_.blobs; ++k) {
        const DecodedBlob& bl = blobs[static_cast<std::size_t>(k)];
        const double dx = x - bl.cx;
        const double dy = y - bl.cy;
        r2k[static_cast<std::size_t>(k)] = dx * dx + dy * dy;
        gk[static_cast<std::size_t>(k)] =
            std::exp(-r2k[static_cast<std::size_t>(k)] /
                     (2.0 * bl.sigma * bl.sigma));
      }
      for (int c = 0; c < ch; ++c) {
        s_pix = 0.0;
        for (int k = 0; k < spec_.blobs; ++k) {
          s_pix += z.values[static_cast<std::size_t>(k) * kStride + 3 + c] *
                   gk[static_cast<std::size_t>(k)];
        }
        const double t = std::tanh(s_pix);
        const double wgt = cotangent.at(y, x, c) * (1.0 - t * t);
        if (wgt == 0.0) continue;
        for (int k = 0; k < spec_.blobs; ++k) {
          const DecodedBlob& bl = blobs[static_cast<std::size_t>(k)];
          const double a = z.values[static_cast<std::size_t>(k) * kStride + 3 + c];
          const double g = gk[static_cast<std::size_t>(k)];
          const double dx = x - bl.cx;
          const double dy = y - bl.cy;
          const double sig2 = bl.sigma * bl.sigma;
          double* gz = grad.values.data() + static_cast<std::size_t>(k) * kStride;
          gz[0] += wgt * a * g * (dx / sig2) * dcx_dz;
          gz[1] += wgt * a * g * (dy / sig2) * dcy_dz;
          gz[2] += wgt * a * g *
                   (r2k[static_cast<std::size_t>(k)] / (sig2 * bl.sigma)) *
                   dsig_dz;
          gz[3 + c] += wgt * g;
        }
      }
    }
  }
  return grad;
}

std::uint64_t BlobGenerator::fingerprint() const {
  // Canonical little-endian pack of the spec fields.
  unsigned char buf[4 * sizeof(std::int32_t) + 2 * sizeof(double)];
  std::int32_t ints[4] = {spec_.blobs, spec_.height, spec_.width,
                          spec_.channels};
  double reals[2] = {spec_.sigma_min, spec_.sigma_max};
  std::memcpy(buf, ints, sizeof(ints));
  std::memcpy(buf + sizeof(ints), reals, sizeof(reals));
  return fnv1a64(buf, sizeof(buf), fnv1a64("blob", 4));
}

}  // namespace zinpaint
