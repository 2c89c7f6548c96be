#include <doctest.h>

#include <cmath>
#include <utility>

#include "dyntex/classify/ensemble.hpp"
#include "dyntex/classify/focal.hpp"
#include "dyntex/classify/head.hpp"
#include "dyntex/classify/roi.hpp"
#include "dyntex/classify/train.hpp"

using namespace dyntex;
using namespace dyntex::classify;

namespace {

Tensor64 vec(std::vector<double> v) {
  const std::size_t n = v.size();
  return Tensor64({n}, std::move(v));
}

// Four textures that differ only in stripe orientation and period.
std::vector<LabeledInput> stripe_dataset(std::size_t per_class, std::size_t side, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledInput> out;
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      LabeledInput s;
      s.label = c;
      s.input.image = Tensor64({kInputChannels, side, side}, 0.0);
      s.input.pixel_mask = Tensor64({side, side}, 1.0);
      const double phase = rng.uniform(0, 6.283);
      const double period = c < 2 ? 2.0 : 6.0;
      for (std::size_t y = 0; y < side; ++y)
        for (std::size_t x = 0; x < side; ++x) {
          const double t = (c % 2 == 0 ? double(x) : double(y)) * 6.283 / period + phase;
          for (std::size_t ch = 0; ch < 4; ++ch) s.input.image(ch, y, x) = std::sin(t) + rng.normal(0.0, 0.3);
          s.input.image(4, y, x) = 1.0;
        }
      out.push_back(std::move(s));
    }
  }
  return out;
}

double train_accuracy(const ClassifierModel& m, const std::vector<LabeledInput>& data) {
  std::size_t ok = 0;
  for (const auto& s : data) ok += argmax(predict_proba(m, s.input)) == s.label;
  return static_cast<double>(ok) / static_cast<double>(data.size());
}

}  // namespace

TEST_CASE("head forward: uniform at zero, shift invariance, saturation") {
  HeadParams zero{Tensor64({4, 3}, 0.0), Tensor64({4}, 0.0)};
  const auto p = head_forward(vec({0.3, -1.0, 2.0}), zero);
  for (double v : p.storage()) CHECK(v == doctest::Approx(0.25));

  const auto a = softmax(vec({1.0, 2.0, -0.5}));
  const auto b = softmax(vec({101.0, 102.0, 99.5}));
  double sum = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(a[i] - b[i]) < 1e-12);
    sum += a[i];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  // 1 / (1 + 3 e^-10)
  CHECK(softmax(vec({10, 0, 0, 0}))[0] == doctest::Approx(0.9998638).epsilon(1e-7));

  CHECK_THROWS(head_forward(vec({1.0, 2.0}), zero));
}

TEST_CASE("weighted focal loss values and shape") {
  const auto w = default_class_weights();
  REQUIRE(w == std::vector<double>{5, 1, 1, 2});
  CHECK(weighted_focal_loss(vec({0.5, 0.2, 0.2, 0.1}), 0, w, 2.0) == doctest::Approx(0.86643).epsilon(1e-5));
  CHECK(weighted_focal_loss(vec({1 - 1e-6, 1e-6, 0, 0}), 0, w, 2.0) < 1e-5);
  // gamma 0 is weighted cross-entropy.
  CHECK(weighted_focal_loss(vec({0.1, 0.3, 0.4, 0.2}), 3, w, 0.0) == doctest::Approx(-2.0 * std::log(0.2)));
  CHECK_THROWS(weighted_focal_loss(vec({0.5, 0.5}), 2, {1, 1}, 2.0));

  double prev = INFINITY;
  for (double p = 0.01; p < 1.0; p += 0.01) {
    const double l = weighted_focal_loss(vec({p, 1 - p}), 0, {1.0, 1.0}, 2.0);
    CHECK(l >= 0.0);
    CHECK(l < prev);
    prev = l;
  }
}

TEST_CASE("majority vote with mean-probability tie break") {
  const std::vector<std::size_t> votes{0, 0, 1, 2, 0};
  std::vector<Tensor64> probs(5, vec({0.25, 0.25, 0.25, 0.25}));
  CHECK(majority_vote(votes, probs) == 0);

  const std::vector<Tensor64> tie{vec({0.7, 0.3, 0, 0}), vec({0.5, 0.5, 0, 0}), vec({0.2, 0.8, 0, 0}),
                                  vec({0.4, 0.6, 0, 0})};
  // Votes 0,0,1,1 with mean probabilities 0.45 and 0.55.
  CHECK(majority_vote({0, 0, 1, 1}, tie) == 1);
  const std::vector<Tensor64> tie2{vec({0.9, 0.1, 0, 0}), vec({0.9, 0.1, 0, 0}), vec({0.3, 0.7, 0, 0}),
                                   vec({0.3, 0.7, 0, 0})};
  CHECK(majority_vote({0, 0, 1, 1}, tie2) == 0);

  CHECK(majority_vote({vec({0.1, 0.2, 0.6, 0.1})}) == 2);
  const std::vector<Tensor64> same(5, vec({0.1, 0.5, 0.3, 0.1}));
  CHECK(majority_vote(same) == 1);
}

TEST_CASE("training reaches high accuracy on separable textures") {
  const auto data = stripe_dataset(200, 12, 3);
  TrainConfig cfg;
  cfg.seed = 11;
  TrainReport rep;
  const auto model = train_classifier(data, 4, cfg, &rep);
  REQUIRE(rep.epoch_loss.size() == 50);
  CHECK(rep.epoch_loss.back() <= 0.5 * rep.epoch_loss.front());
  CHECK(train_accuracy(model, data) >= 0.95);
}

TEST_CASE("training is bit-reproducible and lr 0 leaves parameters unchanged") {
  const auto data = stripe_dataset(6, 8, 5);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 9;
  const auto a = train_classifier(data, 4, cfg);
  const auto b = train_classifier(data, 4, cfg);
  const auto pa = model_parameters(a), pb = model_parameters(b);
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i] == *pb[i]);

  auto frozen = init_model(data, kInputChannels, 4, cfg);
  const auto before = frozen;
  TrainConfig still = cfg;
  still.learning_rate = 0.0;
  train_epochs(frozen, data, still, nullptr);
  const auto p0 = model_parameters(before);
  const auto p1 = model_parameters(std::as_const(frozen));
  for (std::size_t i = 0; i < p0.size(); ++i) CHECK(*p0[i] == *p1[i]);
}

TEST_CASE("an empty class is reported but training proceeds") {
  auto data = stripe_dataset(4, 8, 1);
  std::erase_if(data, [](const LabeledInput& s) { return s.label == 2; });
  TrainConfig cfg;
  cfg.epochs = 1;
  TrainReport rep;
  const auto m = train_classifier(data, 4, cfg, &rep);
  CHECK(m.num_classes() == 4);
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("class 2") != std::string::npos);
}

TEST_CASE("input modes: sadt keeps native size and box mask, deepten resizes with constant mask") {
  pts::SliceCrop crop;
  for (auto& p : crop.phases) p = Tensor64({10, 14}, 80.0);
  crop.box_mask = Tensor64({10, 14}, 0.0);
  crop.seg_mask = Tensor64({10, 14}, 0.0);
  for (std::size_t y = 3; y < 7; ++y)
    for (std::size_t x = 4; x < 10; ++x) crop.box_mask(y, x) = 1.0;
  crop.seg_mask(5, 5) = 1.0;
  RoiConfig cfg;
  const auto s = make_input(crop, InputMode::Sadt, cfg);
  CHECK(s.image.shape() == Shape{5, 10, 14});
  CHECK(s.image(0, 0, 0) == doctest::Approx(0.0));
  CHECK(s.pixel_mask == crop.box_mask);
  CHECK(s.image(4, 4, 5) == 1.0);

  cfg.mask_source = MaskSource::Segmentation;
  CHECK(make_input(crop, InputMode::Sadt, cfg).pixel_mask == crop.seg_mask);

  const auto d = make_input(crop, InputMode::DeepTen, RoiConfig{});
  CHECK(d.image.shape() == Shape{5, 32, 32});
  for (double v : d.pixel_mask.storage()) CHECK(v == 1.0);
  CHECK(d.image(4, 0, 0) == 1.0);
}
