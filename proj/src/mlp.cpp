#include "zinpaint/mlp.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "zinpaint/rng.hpp"

namespace zinpaint {

namespace {

double apply_activation(Activation a, double x) {
  switch (a) {
    case Activation::kTanh:
      return std::tanh(x);
    case Activation::kSigmoid:
      // Stable in both tails.
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                      : std::exp(x) / (1.0 + std::exp(x));
  }
  throw ValueError("unknown activation");
}

// Derivative expressed through the activated value y.
double activation_grad(Activation a, double y) {
  switch (a) {
    case Activation::kTanh:
      return 1.0 - y * y;
    case Activation::kSigmoid:
      return y * (1.0 - y);
  }
  throw ValueError("unknown activation");
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_f32(std::vector<std::uint8_t>& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  append_u32(out, bits);
}

std::uint32_t read_u32(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw IoError("truncated lgw stream");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
  pos += 4;
  return v;
}

float read_f32(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  const std::uint32_t bits = read_u32(in, pos);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

std::string manifest_path(const std::string& lgw_path) {
  return lgw_path + ".json";
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f),
                                   std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const void* data, std::size_t size) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!f) throw IoError("failed writing " + path);
}

nlohmann::json layer_manifest(const Mlp& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const MlpLayer& l : net.layers()) {
    layers.push_back({{"rows", l.rows},
                      {"cols", l.cols},
                      {"activation", activation_name(l.activation)}});
  }
  return layers;
}

void check_manifest_matches(const nlohmann::json& manifest, const Mlp& net,
                            const std::string& path) {
  const auto& layers = manifest.at("layers");
  if (layers.size() != net.layers().size()) {
    throw IoError("manifest layer count does not match binary in " + path);
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const MlpLayer& l = net.layers()[i];
    if (layers[i].at("rows").get<int>() != l.rows ||
        layers[i].at("cols").get<int>() != l.cols ||
        activation_from_name(layers[i].at("activation").get<std::string>()) !=
            l.activation) {
      throw IoError("manifest layer " + std::to_string(i) +
                    " does not match binary in " + path);
    }
  }
}

nlohmann::json load_manifest(const std::string& lgw_path,
                             const std::string& expected_kind) {
  const std::string mpath = manifest_path(lgw_path);
  std::ifstream f(mpath);
  if (!f) throw IoError("cannot open manifest " + mpath);
  nlohmann::json manifest;
  try {
    f >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad manifest " + mpath + ": " + e.what());
  }
  if (manifest.value("format", "") != "lgw1") {
    throw IoError("manifest " + mpath + " is not lgw1 format");
  }
  if (manifest.value("kind", "") != expected_kind) {
    throw IoError("manifest " + mpath + " kind is not '" + expected_kind + "'");
  }
  return manifest;
}

Shape3 shape_from_json(const nlohmann::json& arr) {
  if (!arr.is_array() || arr.size() != 3) {
    throw IoError("manifest shape must be [H, W, C]");
  }
  return Shape3{arr[0].get<int>(), arr[1].get<int>(), arr[2].get<int>()};
}

}  // namespace

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kTanh:
      return "tanh";
    case Activation::kSigmoid:
      return "sigmoid";
  }
  throw ValueError("unknown activation");
}

Activation activation_from_name(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw ValueError("unknown activation name '" + name + "'");
}

Mlp::Mlp(std::vector<MlpLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ShapeError("mlp needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const MlpLayer& l = layers_[i];
    if (l.rows < 1 || l.cols < 1) {
      throw ShapeError("mlp layer " + std::to_string(i) +
                       " has non-positive dimensions");
    }
    if (l.weights.size() != static_cast<std::size_t>(l.rows) * l.cols) {
      throw ShapeError("mlp layer " + std::to_string(i) +
                       " weight count mismatch");
    }
    if (l.bias.size() != static_cast<std::size_t>(l.rows)) {
      throw ShapeError("mlp layer " + std::to_string(i) + " bias count mismatch");
    }
    if (i > 0 && l.cols != layers_[i - 1].rows) {
      throw ShapeError("mlp layer " + std::to_string(i) +
                       " input dim does not chain with previous layer");
    }
  }
}

std::vector<double> Mlp::forward(const std::vector<double>& input) const {
  if (input.size() != static_cast<std::size_t>(input_dim())) {
    throw ShapeError("mlp forward: input length mismatch");
  }
  std::vector<double> x = input;
  std::vector<double> y;
  for (const MlpLayer& l : layers_) {
    y.assign(static_cast<std::size_t>(l.rows), 0.0);
    for (int r = 0; r < l.rows; ++r) {
      double acc = static_cast<double>(l.bias[static_cast<std::size_t>(r)]);
      const float* wrow = l.weights.data() + static_cast<std::size_t>(r) * l.cols;
      for (int c = 0; c < l.cols; ++c) {
        acc += static_cast<double>(wrow[c]) * x[static_cast<std::size_t>(c)];
      }
      y[static_cast<std::size_t>(r)] = apply_activation(l.activation, acc);
    }
    x.swap(y);
  }
  return x;
}

std::vector<double> Mlp::vjp(const std::vector<double>& input,
                             const std::vector<double>& cotangent) const {
  if (cotangent.size() != static_cast<std::size_t>(output_dim())) {
    throw ShapeError("mlp vjp: cotangent length mismatch");
  }
  // Forward pass storing activated values per layer.
  std::vector<std::vector<double>> acts;
  acts.reserve(layers_.size() + 1);
  acts.push_back(input);
  for (const MlpLayer& l : layers_) {
    const std::vector<double>& x = acts.back();
    if (x.size() != static_cast<std::size_t>(l.cols)) {
      throw ShapeError("mlp vjp: input length mismatch");
    }
    std::vector<double> y(static_cast<std::size_t>(l.rows));
    for (int r = 0; r < l.rows; ++r) {
      double acc = static_cast<double>(l.bias[static_cast<std::size_t>(r)]);
      const float* wrow = l.weights.data() + static_cast<std::size_t>(r) * l.cols;
      for (int c = 0; c < l.cols; ++c) {
        acc += static_cast<double>(wrow[c]) * x[static_cast<std::size_t>(c)];
      }
      y[static_cast<std::size_t>(r)] = apply_activation(l.activation, acc);
    }
    acts.push_back(std::move(y));
  }

  std::vector<double> delta = cotangent;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const MlpLayer& l = layers_[li];
    const std::vector<double>& y = acts[li + 1];
    // Through the activation.
    for (int r = 0; r < l.rows; ++r) {
      delta[static_cast<std::size_t>(r)] *=
          activation_grad(l.activation, y[static_cast<std::size_t>(r)]);
    }
    // Through the affine map: prev = W^T delta.
    std::vector<double> prev(static_cast<std::size_t>(l.cols), 0.0);
    for (int r = 0; r < l.rows; ++r) {
      const double d = delta[static_cast<std::size_t>(r)];
      if (d == 0.0) continue;
      const float* wrow = l.weights.data() + static_cast<std::size_t>(r) * l.cols;
      for (int c = 0; c < l.cols; ++c) {
        prev[static_cast<std::size_t>(c)] += static_cast<double>(wrow[c]) * d;
      }
    }
    delta.swap(prev);
  }
  return delta;
}

Mlp::Grads Mlp::backward(const std::vector<double>& input,
                         const std::vector<double>& cotangent) const {
  if (cotangent.size() != static_cast<std::size_t>(output_dim())) {
    throw ShapeError("mlp backward: cotangent length mismatch");
  }
  std::vector<std::vector<double>> acts;
  acts.reserve(layers_.size() + 1);
  acts.push_back(input);
  for (const MlpLayer& l : layers_) {
    const std::vector<double>& x = acts.back();
    if (x.size() != static_cast<std::size_t>(l.cols)) {
      throw ShapeError("mlp backward: input length mismatch");
    }
    std::vector<double> y(static_cast<std::size_t>(l.rows));
    for (int r = 0; r < l.rows; ++r) {
      double acc = static_cast<double>(l.bias[static_cast<std::size_t>(r)]);
      const float* wrow = l.weights.data() + static_cast<std::size_t>(r) * l.cols;
      for (int c = 0; c < l.cols; ++c) {
        acc += static_cast<double>(wrow[c]) * x[static_cast<std::size_t>(c)];
      }
      y[static_cast<std::size_t>(r)] = apply_activation(l.activation, acc);
    }
    acts.push_back(std::move(y));
  }

  Grads grads;
  grads.weights.resize(layers_.size());
  grads.bias.resize(layers_.size());
  std::vector<double> delta = cotangent;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const MlpLayer& l = layers_[li];
    const std::vector<double>& y = acts[li + 1];
    const std::vector<double>& x = acts[li];
    for (int r = 0; r < l.rows; ++r) {
      delta[static_cast<std::size_t>(r)] *=
          activation_grad(l.activation, y[static_cast<std::size_t>(r)]);
    }
    grads.bias[li] = delta;
    grads.weights[li].assign(static_cast<std::size_t>(l.rows) * l.cols, 0.0);
    std::vector<double> prev(static_cast<std::size_t>(l.cols), 0.0);
    for (int r = 0; r < l.rows; ++r) {
      const double d = delta[static_cast<std::size_t>(r)];
      double* gw = grads.weights[li].data() + static_cast<std::size_t>(r) * l.cols;
      const float* wrow = l.weights.data() + static_cast<std::size_t>(r) * l.cols;
      for (int c = 0; c < l.cols; ++c) {
        gw[c] = d * x[static_cast<std::size_t>(c)];
        prev[static_cast<std::size_t>(c)] += static_cast<double>(wrow[c]) * d;
      }
    }
    delta.swap(prev);
  }
  grads.input = std::move(delta);
  return grads;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const MlpLayer& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

Mlp make_random_mlp(int input_dim, const std::vector<int>& hidden,
                    int output_dim, Activation final_activation,
                    std::uint64_t seed) {
  std::vector<int> dims;
  dims.push_back(input_dim);
  for (int h : hidden) {
    if (h < 1) throw ValueError("hidden layer width must be >= 1");
    dims.push_back(h);
  }
  dims.push_back(output_dim);

  Rng rng(seed);
  std::vector<MlpLayer> layers;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    MlpLayer l;
    l.cols = dims[i];
    l.rows = dims[i + 1];
    l.activation =
        (i + 2 == dims.size()) ? final_activation : Activation::kTanh;
    const double limit = std::sqrt(6.0 / (l.cols + l.rows));
    l.weights.resize(static_cast<std::size_t>(l.rows) * l.cols);
    for (float& w : l.weights) {
      w = static_cast<float>(rng.uniform(-limit, limit));
    }
    l.bias.assign(static_cast<std::size_t>(l.rows), 0.0f);
    layers.push_back(std::move(l));
  }
  return Mlp(std::move(layers));
}

std::vector<std::uint8_t> serialize_lgw(const Mlp& net) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), {'L', 'G', 'W', '1'});
  append_u32(out, static_cast<std::uint32_t>(net.layers().size()));
  for (const MlpLayer& l : net.layers()) {
    append_u32(out, static_cast<std::uint32_t>(l.rows));
    append_u32(out, static_cast<std::uint32_t>(l.cols));
    append_u32(out, static_cast<std::uint32_t>(l.activation));
    for (float w : l.weights) append_f32(out, w);
    for (float b : l.bias) append_f32(out, b);
  }
  return out;
}

Mlp deserialize_lgw(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || bytes[0] != 'L' || bytes[1] != 'G' ||
      bytes[2] != 'W' || bytes[3] != '1') {
    throw IoError("not an LGW1 stream");
  }
  std::size_t pos = 4;
  const std::uint32_t count = read_u32(bytes, pos);
  if (count == 0 || count > 64) throw IoError("implausible lgw layer count");
  std::vector<MlpLayer> layers(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    MlpLayer& l = layers[i];
    l.rows = static_cast<int>(read_u32(bytes, pos));
    l.cols = static_cast<int>(read_u32(bytes, pos));
    const std::uint32_t act = read_u32(bytes, pos);
    if (act > 1) throw IoError("unknown activation tag in lgw stream");
    l.activation = static_cast<Activation>(act);
    if (l.rows < 1 || l.cols < 1 || l.rows > (1 << 20) || l.cols > (1 << 20)) {
      throw IoError("implausible lgw layer dimensions");
    }
    l.weights.resize(static_cast<std::size_t>(l.rows) * l.cols);
    for (float& w : l.weights) w = read_f32(bytes, pos);
    l.bias.resize(static_cast<std::size_t>(l.rows));
    for (float& b : l.bias) b = read_f32(bytes, pos);
  }
  if (pos != bytes.size()) throw IoError("trailing bytes in lgw stream");
  return Mlp(std::move(layers));
}

std::uint64_t mlp_fingerprint(const Mlp& net) {
  const std::vector<std::uint8_t> bytes = serialize_lgw(net);
  return fnv1a64(bytes.data(), bytes.size());
}

MlpGenerator::MlpGenerator(Mlp net, Shape3 output_shape)
    : net_(std::move(net)), shape_(output_shape) {
  if (shape_.count() != static_cast<std::size_t>(net_.output_dim())) {
    throw ShapeError("generator output shape does not match network output dim");
  }
  if (net_.layers().back().activation != Activation::kTanh) {
    throw ValueError("generator final activation must be tanh");
  }
}

Image MlpGenerator::forward(const Latent& z) const {
  if (z.dim() != latent_dim()) {
    throw ShapeError("mlp generator: latent length mismatch");
  }
  std::vector<double> out = net_.forward(z.values);
  return Image::from_data(shape_.height, shape_.width, shape_.channels,
                          std::move(out));
}

Latent MlpGenerator::vjp(const Latent& z, const Image& cotangent) const {
  if (z.dim() != latent_dim()) {
    throw ShapeError("mlp generator: latent length mismatch");
  }
  if (cotangent.size() != shape_.count()) {
    throw ShapeError("mlp generator: cotangent shape mismatch");
  }
  return Latent(net_.vjp(z.values, cotangent.values()));
}

void MlpGenerator::save(const std::string& lgw_path) const {
  const std::vector<std::uint8_t> bytes = serialize_lgw(net_);
  write_file(lgw_path, bytes.data(), bytes.size());
  nlohmann::json manifest = {
      {"format", "lgw1"},
      {"kind", "generator"},
      {"latent_dim", latent_dim()},
      {"output_shape", {shape_.height, shape_.width, shape_.channels}},
      {"layers", layer_manifest(net_)}};
  const std::string text = manifest.dump(2) + "\n";
  write_file(manifest_path(lgw_path), text.data(), text.size());
}

MlpGenerator MlpGenerator::load(const std::string& lgw_path) {
  Mlp net = deserialize_lgw(read_file(lgw_path));
  nlohmann::json manifest = load_manifest(lgw_path, "generator");
  check_manifest_matches(manifest, net, lgw_path);
  const Shape3 shape = shape_from_json(manifest.at("output_shape"));
  if (manifest.at("latent_dim").get<int>() != net.input_dim()) {
    throw IoError("manifest latent_dim does not match binary in " + lgw_path);
  }
  return MlpGenerator(std::move(net), shape);
}

MlpDiscriminator::MlpDiscriminator(Mlp net, Shape3 input_shape)
    : net_(std::move(net)), shape_(input_shape) {
  if (shape_.count() != static_cast<std::size_t>(net_.input_dim())) {
    throw ShapeError("discriminator input shape does not match network input dim");
  }
  if (net_.output_dim() != 1) {
    throw ShapeError("discriminator network must output a single value");
  }
  if (net_.layers().back().activation != Activation::kSigmoid) {
    throw ValueError("discriminator final activation must be sigmoid");
  }
}

double MlpDiscriminator::forward(const Image& image) const {
  if (image.size() != shape_.count()) {
    throw ShapeError("mlp discriminator: image shape mismatch");
  }
  return net_.forward(image.values())[0];
}

Image MlpDiscriminator::vjp(const Image& image, double cotangent) const {
  if (image.size() != shape_.count()) {
    throw ShapeError("mlp discriminator: image shape mismatch");
  }
  std::vector<double> grad = net_.vjp(image.values(), {cotangent});
  return Image::from_data(shape_.height, shape_.width, shape_.channels,
                          std::move(grad));
}

void MlpDiscriminator::save(const std::string& lgw_path) const {
  const std::vector<std::uint8_t> bytes = serialize_lgw(net_);
  write_file(lgw_path, bytes.data(), bytes.size());
  nlohmann::json manifest = {
      {"format", "lgw1"},
      {"kind", "discriminator"},
      {"input_shape", {shape_.height, shape_.width, shape_.channels}},
      {"layers", layer_manifest(net_)}};
  const std::string text = manifest.dump(2) + "\n";
  write_file(manifest_path(lgw_path), text.data(), text.size());
}

MlpDiscriminator MlpDiscriminator::load(const std::string& lgw_path) {
  Mlp net = deserialize_lgw(read_file(lgw_path));
  nlohmann::json manifest = load_manifest(lgw_path, "discriminator");
  check_manifest_matches(manifest, net, lgw_path);
  const Shape3 shape = shape_from_json(manifest.at("input_shape"));
  return MlpDiscriminator(std::move(net), shape);
}

}  // namespace zinpaint
