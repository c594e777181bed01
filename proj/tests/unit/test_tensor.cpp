#include <doctest.h>

#include "zinpaint/rng.hpp"
#include "zinpaint/tensor.hpp"

using namespace zinpaint;

namespace {

Image random_image(Rng& rng, int h, int w, int c, double lo = -1.0,
                   double hi = 1.0) {
  Image img(h, w, c);
  for (double& v : img.values()) v = rng.uniform(lo, hi);
  return img;
}

Mask random_mask(Rng& rng, int h, int w) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(h) * w);
  for (auto& v : data) v = rng.uniform() < 0.5 ? 0 : 1;
  data[0] = 1;  // keep at least one unmasked pixel
  return Mask(h, w, std::move(data));
}

}  // namespace

TEST_SUITE("tensor") {

TEST_CASE("image construction validates shape, finiteness, range") {
  CHECK_THROWS_AS(Image(0, 4, 1), ShapeError);
  CHECK_THROWS_AS(Image(4, 4, 2), ShapeError);
  CHECK_THROWS_AS(Image::from_data(2, 2, 1, {1, 2, 3}), ShapeError);
  CHECK_THROWS_AS(Image::from_data(2, 2, 1, {0, 0, 0, 1.0 / 0.0}), ValueError);
  CHECK_THROWS_AS(Image::bounded(2, 2, 1, {0, 0, 0, 1.5}), ValueError);
  const Image ok = Image::bounded(2, 2, 1, {-1, 1, 0, 0.5});
  CHECK(ok.at(0, 1, 0) == 1.0);
  // Intermediate arithmetic may leave [-1, 1].
  CHECK(Image::from_data(1, 2, 1, {1.75, -2.0}).at(0, 0, 0) == 1.75);
}

TEST_CASE("mask invariants") {
  CHECK_THROWS_AS(Mask(2, 2, {0, 0, 0, 2}), ValueError);
  CHECK_THROWS_AS(Mask(2, 2, {0, 0, 0, 0}), ValueError);  // no unmasked pixel
  CHECK_THROWS_AS(Mask(2, 2, {1, 1}), ShapeError);
  const Mask m(1, 2, {0, 1});
  CHECK(m.ones() == 1);
}

TEST_CASE("latent validation") {
  CHECK_THROWS_AS(Latent::from({}), ShapeError);
  CHECK_THROWS_AS(Latent::from({0.0, 0.0 / 0.0}), ValueError);
  CHECK(Latent::zeros(3).dim() == 3);
}

TEST_CASE("mask_apply identity and pointwise product") {
  const Image img = Image::from_data(2, 2, 1, {0.5, -0.5, 1, -1});
  CHECK(mask_apply(img, Mask::all_ones(2, 2)).values() == img.values());

  const Mask m(2, 2, {1, 0, 0, 1});
  const Image out = mask_apply(img, m);
  CHECK(out.values() == std::vector<double>{0.5, 0, 0, -1});

  CHECK_THROWS_AS(mask_apply(img, Mask::all_ones(2, 3)), ShapeError);
}

TEST_CASE("mask_apply is idempotent, exactly") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Image img = random_image(rng, 5, 4, 3);
    const Mask m = random_mask(rng, 5, 4);
    const Image once = mask_apply(img, m);
    const Image twice = mask_apply(once, m);
    CHECK(once.values() == twice.values());
  }
}

TEST_CASE("gradients: forward difference with zero trailing boundary") {
  const Image row = Image::from_data(1, 3, 1, {0, 1, 3});
  CHECK(grad_x(row).values() == std::vector<double>{1, 2, 0});

  const Image constant = Image::from_data(3, 3, 1, std::vector<double>(9, 0.4));
  for (double v : grad_x(constant).values()) CHECK(v == 0.0);
  for (double v : grad_y(constant).values()) CHECK(v == 0.0);

  CHECK_THROWS_AS(grad_x(Image::from_data(3, 1, 1, {1, 2, 3})), ShapeError);
  CHECK_THROWS_AS(grad_y(Image::from_data(1, 3, 1, {1, 2, 3})), ShapeError);
}

TEST_CASE("grad_y of a step edge equals grad_x of its transpose") {
  // Horizontal step edge: rows of 0 then rows of 1.
  Image img(4, 4, 1);
  for (int y = 2; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) img.at(y, x, 0) = 1.0;
  }
  Image transposed(4, 4, 1);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) transposed.at(y, x, 0) = img.at(x, y, 0);
  }
  const Image gy = grad_y(img);
  const Image gx = grad_x(transposed);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) CHECK(gy.at(y, x, 0) == gx.at(x, y, 0));
  }
}

TEST_CASE("gradient operators are linear") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Image a = random_image(rng, 6, 5, 1);
    const Image b = random_image(rng, 6, 5, 1);
    const double alpha = rng.uniform(-2, 2), beta = rng.uniform(-2, 2);
    Image combo(6, 5, 1);
    for (std::size_t i = 0; i < combo.size(); ++i) {
      combo.values()[i] = alpha * a.values()[i] + beta * b.values()[i];
    }
    const Image lhs = grad_x(combo);
    const Image ga = grad_x(a), gb = grad_x(b);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      CHECK(lhs.values()[i] ==
            doctest::Approx(alpha * ga.values()[i] + beta * gb.values()[i])
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("l1_sum basics") {
  const Image a = Image::from_data(2, 2, 1, {0.1, 0.2, 0.3, 0.4});
  CHECK(l1_sum(a, a) == 0.0);

  Image b = a;
  for (double& v : b.values()) v += 0.1;
  CHECK(l1_sum(a, b) == doctest::Approx(0.4).epsilon(1e-12));

  // Weight zero everywhere except one element.
  Image c = a;
  c.at(1, 0, 0) += 0.3;
  const Mask w(2, 2, {0, 0, 1, 0});
  CHECK(l1_sum(a, c, w) == doctest::Approx(0.3).epsilon(1e-12));

  CHECK_THROWS_AS(l1_sum(a, Image(3, 2, 1)), ShapeError);
}

TEST_CASE("l1_sum is symmetric and nonnegative") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Image a = random_image(rng, 4, 4, 3);
    const Image b = random_image(rng, 4, 4, 3);
    const Mask m = random_mask(rng, 4, 4);
    CHECK(l1_sum(a, b) == l1_sum(b, a));
    CHECK(l1_sum(a, b, m) == l1_sum(b, a, m));
    CHECK(l1_sum(a, b) >= 0.0);
  }
}

}  // TEST_SUITE
