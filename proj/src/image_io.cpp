#include "zinpaint/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>

#include <png.h>

namespace zinpaint {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngBytes {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;  // row-major, channel-interleaved
};

PngBytes read_png(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("cannot open " + path);

  png_byte header[8];
  if (std::fread(header, 1, 8, f.get()) != 8 || png_sig_cmp(header, 0, 8)) {
    throw IoError(path + " is not a PNG file");
  }

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed reading " + path);
  }
  png_init_io(png, f.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);
  if (bit_depth != 8 ||
      (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path + ": only 8-bit grayscale or RGB PNGs are supported");
  }

  PngBytes out;
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.channels = color_type == PNG_COLOR_TYPE_GRAY ? 1 : 3;
  out.data.resize(static_cast<std::size_t>(out.height) * out.width *
                  out.channels);

  std::vector<png_bytep> rows(static_cast<std::size_t>(out.height));
  const std::size_t stride =
      static_cast<std::size_t>(out.width) * out.channels;
  for (int y = 0; y < out.height; ++y) {
    rows[static_cast<std::size_t>(y)] = out.data.data() + y * stride;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void write_png(const PngBytes& bytes, const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot open " + path + " for writing");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing " + path);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(bytes.width),
               static_cast<png_uint_32>(bytes.height), 8,
               bytes.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_bytep> rows(static_cast<std::size_t>(bytes.height));
  const std::size_t stride =
      static_cast<std::size_t>(bytes.width) * bytes.channels;
  for (int y = 0; y < bytes.height; ++y) {
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(bytes.data.data() + y * stride);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::uint8_t to_byte(double v) {
  const double scaled = (v + 1.0) * 255.0 / 2.0;
  const double rounded = std::floor(scaled + 0.5);  // round half up
  return static_cast<std::uint8_t>(std::clamp(rounded, 0.0, 255.0));
}

std::string frame_name(const char* prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%04d.png", prefix, index);
  return buf;
}

}  // namespace

Image load_image(const std::string& path) {
  const PngBytes bytes = read_png(path);
  std::vector<double> data(bytes.data.size());
  for (std::size_t i = 0; i < bytes.data.size(); ++i) {
    data[i] = static_cast<double>(bytes.data[i]) * 2.0 / 255.0 - 1.0;
  }
  return Image::bounded(bytes.height, bytes.width, bytes.channels,
                        std::move(data));
}

void save_image(const Image& image, const std::string& path) {
  PngBytes bytes;
  bytes.height = image.height();
  bytes.width = image.width();
  bytes.channels = image.channels();
  bytes.data.resize(image.size());
  const double* src = image.data();
  for (std::size_t i = 0; i < image.size(); ++i) bytes.data[i] = to_byte(src[i]);
  write_png(bytes, path);
}

Mask load_mask(const std::string& path) {
  const PngBytes bytes = read_png(path);
  if (bytes.channels != 1) {
    throw IoError(path + ": masks must be grayscale PNGs");
  }
  std::vector<std::uint8_t> data(bytes.data.size());
  for (std::size_t i = 0; i < bytes.data.size(); ++i) {
    if (bytes.data[i] == 0) {
      data[i] = 0;
    } else if (bytes.data[i] == 255) {
      data[i] = 1;
    } else {
      throw IoError(path + ": mask pixels must be 0 or 255, found " +
                    std::to_string(bytes.data[i]));
    }
  }
  return Mask(bytes.height, bytes.width, std::move(data));
}

void save_mask(const Mask& mask, const std::string& path) {
  PngBytes bytes;
  bytes.height = mask.height();
  bytes.width = mask.width();
  bytes.channels = 1;
  bytes.data.resize(mask.values().size());
  for (std::size_t i = 0; i < bytes.data.size(); ++i) {
    bytes.data[i] = mask.values()[i] ? 255 : 0;
  }
  write_png(bytes, path);
}

std::vector<std::pair<Image, Mask>> load_sequence(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw IoError(dir + " is not a directory");
  }

  // Collect frame indices present, then demand contiguity from 0.
  int max_index = -1;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    int index = -1;
    if (std::sscanf(name.c_str(), "frame_%4d.png", &index) == 1 &&
        name == frame_name("frame", index)) {
      max_index = std::max(max_index, index);
    }
  }
  if (max_index < 0) {
    throw IoError("no frame_0000.png style frames found in " + dir);
  }

  std::vector<std::pair<Image, Mask>> frames;
  frames.reserve(static_cast<std::size_t>(max_index) + 1);
  for (int i = 0; i <= max_index; ++i) {
    const fs::path frame_path = fs::path(dir) / frame_name("frame", i);
    const fs::path mask_path = fs::path(dir) / frame_name("mask", i);
    if (!fs::exists(frame_path)) {
      throw IoError("missing " + frame_path.string() +
                    " (frame indices must be contiguous)");
    }
    if (!fs::exists(mask_path)) {
      throw IoError("missing " + mask_path.string());
    }
    Image image = load_image(frame_path.string());
    Mask mask = load_mask(mask_path.string());
    if (image.height() != mask.height() || image.width() != mask.width()) {
      throw IoError("frame " + std::to_string(i) +
                    ": mask size does not match frame");
    }
    if (!frames.empty() && !image.same_shape(frames.front().first)) {
      throw IoError("frame " + std::to_string(i) +
                    ": shape differs from frame 0");
    }
    frames.emplace_back(std::move(image), std::move(mask));
  }
  return frames;
}

}  // namespace zinpaint
