#pragma once

#include <string>
#include <utility>
#include <vector>

#include "zinpaint/tensor.hpp"

namespace zinpaint {

// 8-bit grayscale or RGB PNG; byte k maps linearly to k * 2/255 - 1.
Image load_image(const std::string& path);

// Inverse map with round-half-up and clamping to [0, 255].
void save_image(const Image& image, const std::string& path);

// 8-bit grayscale PNG whose pixels must all be 0 or 255.
Mask load_mask(const std::string& path);
void save_mask(const Mask& mask, const std::string& path);

// Directory of frame_%04d.png / mask_%04d.png pairs, contiguous from 0.
// Gaps, missing masks, or shape drift raise IoError naming the offender.
std::vector<std::pair<Image, Mask>> load_sequence(const std::string& dir);

}  // namespace zinpaint
