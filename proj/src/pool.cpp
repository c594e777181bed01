#include "zinpaint/pool.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "zinpaint/losses.hpp"
#include "zinpaint/metrics.hpp"

namespace zinpaint {

namespace {

void append_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_f32(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  append_u32(out, bits);
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;

  std::uint32_t u32() {
    if (pos + 4 > buf.size()) throw IoError("truncated lpool stream");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i]))
           << (8 * i);
    }
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t lo = u32();
    std::uint64_t hi = u32();
    return lo | (hi << 32);
  }
  float f32() {
    const std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
};

constexpr char kMagic[6] = {'L', 'P', 'O', 'O', 'L', '1'};

}  // namespace

Pool::Pool(std::vector<PoolEntry> entries, std::uint64_t generator_fingerprint)
    : entries_(std::move(entries)), fingerprint_(generator_fingerprint) {
  if (entries_.empty()) throw ValueError("pool must contain at least one entry");
  const int dim = entries_.front().z.dim();
  const Image& first = entries_.front().image;
  for (const PoolEntry& e : entries_) {
    if (e.z.dim() != dim || !e.image.same_shape(first)) {
      throw ShapeError("pool entries must share latent dim and image shape");
    }
  }
}

Pool build_pool(const Generator& g, int n, std::uint64_t seed) {
  if (n < 1) throw ValueError("pool size must be >= 1");
  Rng rng(seed);
  std::vector<PoolEntry> entries;
  entries.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Latent z = sample_latent(rng, g.latent_dim());
    Image image = g.forward(z);
    entries.push_back(PoolEntry{std::move(z), std::move(image)});
  }
  return Pool(std::move(entries), g.fingerprint());
}

NnInit nn_init(const Image& damaged, const Mask& mask, const Pool& pool,
               double gamma) {
  NnInit best;
  for (int i = 0; i < pool.size(); ++i) {
    const double loss = nn_matching_loss(damaged, mask, pool.entry(i).image, gamma);
    if (best.index < 0 || loss < best.loss) {
      best.index = i;
      best.loss = loss;
      best.z = pool.entry(i).z;
    }
  }
  return best;
}

void save_pool(const Pool& pool, const std::string& path) {
  const Image& first = pool.entry(0).image;
  const int dim = pool.entry(0).z.dim();
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  append_u32(out, static_cast<std::uint32_t>(pool.size()));
  append_u32(out, static_cast<std::uint32_t>(dim));
  append_u32(out, static_cast<std::uint32_t>(first.height()));
  append_u32(out, static_cast<std::uint32_t>(first.width()));
  append_u32(out, static_cast<std::uint32_t>(first.channels()));
  append_u64(out, pool.generator_fingerprint());
  for (const PoolEntry& e : pool.entries()) {
    for (double v : e.z.values) append_f32(out, static_cast<float>(v));
  }
  for (const PoolEntry& e : pool.entries()) {
    for (double v : e.image.values()) append_f32(out, static_cast<float>(v));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("failed writing " + path);
}

Pool load_pool(const std::string& path, const Generator& g) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(f)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kMagic) ||
      std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    throw IoError(path + " is not an LPOOL1 file");
  }
  Reader r{buf, sizeof(kMagic)};
  const std::uint32_t n = r.u32();
  const std::uint32_t dim = r.u32();
  const std::uint32_t h = r.u32();
  const std::uint32_t w = r.u32();
  const std::uint32_t c = r.u32();
  const std::uint64_t fingerprint = r.u64();
  if (n == 0) throw IoError("empty pool in " + path);
  if (fingerprint != g.fingerprint()) {
    throw IoError("pool " + path + " was built with a different generator");
  }
  const Shape3 shape = g.output_shape();
  if (static_cast<int>(h) != shape.height || static_cast<int>(w) != shape.width ||
      static_cast<int>(c) != shape.channels ||
      static_cast<int>(dim) != g.latent_dim()) {
    throw IoError("pool " + path + " shape does not match generator");
  }

  std::vector<PoolEntry> entries(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<double> z(dim);
    for (auto& v : z) v = static_cast<double>(r.f32());
    entries[i].z = Latent::from(std::move(z));
  }
  const std::size_t count = static_cast<std::size_t>(h) * w * c;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<double> img(count);
    for (auto& v : img) v = static_cast<double>(r.f32());
    entries[i].image = Image::from_data(static_cast<int>(h), static_cast<int>(w),
                                        static_cast<int>(c), std::move(img));
  }
  if (r.pos != buf.size()) throw IoError("trailing bytes in " + path);

  // Spot-check a few stored images against fresh renders; the float32
  // round trip bounds the expected discrepancy.
  const std::uint32_t checks = n < 3 ? n : 3;
  for (std::uint32_t k = 0; k < checks; ++k) {
    const std::uint32_t i = k * (n - 1) / (checks > 1 ? checks - 1 : 1);
    const Image fresh = g.forward(entries[i].z);
    const double* a = fresh.data();
    const double* b = entries[i].image.data();
    for (std::size_t j = 0; j < count; ++j) {
      if (std::abs(a[j] - b[j]) > 1e-5) {
        throw IoError("pool " + path + " images do not match the generator");
      }
    }
  }
  return Pool(std::move(entries), fingerprint);
}

std::vector<PoolQualityPoint> pool_quality_curve(const Generator& g,
                                                 const Image& damaged,
                                                 const Mask& mask,
                                                 const std::vector<int>& ns,
                                                 std::uint64_t seed,
                                                 double gamma) {
  if (ns.empty()) throw ValueError("pool_quality_curve: no sizes given");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 1) throw ValueError("pool sizes must be >= 1");
    if (i > 0 && ns[i] <= ns[i - 1]) {
      throw ValueError("pool sizes must be strictly ascending");
    }
  }
  const Pool pool = build_pool(g, ns.back(), seed);
  std::vector<PoolQualityPoint> curve;
  curve.reserve(ns.size());
  PoolQualityPoint best;
  int scanned = 0;
  for (int n : ns) {
    for (; scanned < n; ++scanned) {
      const double loss =
          nn_matching_loss(damaged, mask, pool.entry(scanned).image, gamma);
      if (best.index < 0 || loss < best.matching_loss) {
        best.index = scanned;
        best.matching_loss = loss;
      }
    }
    PoolQualityPoint point = best;
    point.n = n;
    point.ms_ssim =
        ms_ssim(mask_apply(pool.entry(best.index).image, mask), damaged);
    curve.push_back(point);
  }
  return curve;
}

}  // namespace zinpaint
