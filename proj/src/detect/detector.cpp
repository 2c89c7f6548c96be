#include "dyntex/detect/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dyntex/detect/decode.hpp"
#include "dyntex/detect/targets.hpp"
#include "dyntex/numerics/rng.hpp"

namespace dyntex::detect {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Standardised heat features of every cell, cell-major.
std::vector<float> standardized(const FeatureBank& bank, const PhaseHeads& h) {
  const std::size_t F = bank.heat.size(), n = dims_volume(bank.dims);
  std::vector<float> x(n * F);
  for (std::size_t f = 0; f < F; ++f) {
    const float mu = static_cast<float>(h.mean[f]);
    const float inv = static_cast<float>(1.0 / h.stdev[f]);
    for (std::size_t i = 0; i < n; ++i) x[i * F + f] = (bank.heat[f].data[i] - mu) * inv;
  }
  return x;
}

double heat_logit(const PhaseHeads& h, const float* x, std::size_t F) {
  double z = h.heat_b;
  for (std::size_t f = 0; f < F; ++f) z += h.heat_w[f] * x[f];
  return z;
}

struct HeadSample {
  std::vector<double> x;
  double target;
};

// Full-batch subgradient descent on mean |w.x - t| with a decaying step.
void fit_l1(std::vector<double>& w, const std::vector<HeadSample>& samples, double lr, std::size_t iters) {
  if (samples.empty()) return;
  std::vector<double> g(w.size());
  for (std::size_t it = 0; it < iters; ++it) {
    std::fill(g.begin(), g.end(), 0.0);
    for (const auto& s : samples) {
      const double r = std::inner_product(w.begin(), w.end(), s.x.begin(), 0.0) - s.target;
      const double sg = r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0);
      for (std::size_t j = 0; j < w.size(); ++j) g[j] += sg * s.x[j];
    }
    const double step = lr / (1.0 + static_cast<double>(it) / 200.0) / static_cast<double>(samples.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= step * g[j];
  }
}

std::vector<double> offset_input(const FeatureBank& bank, const std::array<std::size_t, 3>& cell, int axis) {
  const auto f = offset_features(bank, cell, axis);
  std::vector<double> x(f.begin(), f.end());
  x.push_back(1.0);
  return x;
}

std::vector<double> size_input(const FeatureBank& bank, const std::array<std::size_t, 3>& cell, int axis) {
  const auto f = size_features(bank, cell, axis);
  return {f.begin(), f.end()};
}

}  // namespace

HeatTarget detection_target(const std::vector<Box3D>& boxes, const FeatureBank& bank, const SigmaRule& rule) {
  std::vector<CenterSize> cs;
  std::vector<GaussianSpec> specs;
  const Vec3 gamma = gamma_from_spacing(bank.spacing_mm);
  for (const auto& b : boxes) {
    cs.push_back(to_detection_grid(box_to_center_size(b), bank.source_dims, bank.dims));
    specs.push_back({sigma_for_size(cs.back().s, 1, rule), gamma});
  }
  return render_targets(cs, bank.dims, 1, specs);
}

DetectorModel train_detector(const std::vector<DetectorStudy>& studies, const FeatureConfig& features,
                             const DetectorTrainConfig& cfg, DetectorTrainReport* report) {
  if (studies.empty()) throw std::invalid_argument("train_detector: no training studies");
  DetectorModel model;
  model.features = features;
  const std::size_t F = num_heat_features(features);

  for (std::size_t p = 0; p < 4; ++p) {
    PhaseHeads& h = model.phases[p];
    std::vector<FeatureBank> banks;
    std::vector<HeatTarget> targets;
    banks.reserve(studies.size());
    for (const auto& st : studies) {
      banks.push_back(compute_features(st.phases[p], features));
      targets.push_back(detection_target(st.boxes, banks.back(), cfg.sigma));
    }

    // Feature standardisation over all training cells.
    h.mean.assign(F, 0.0);
    h.stdev.assign(F, 0.0);
    double count = 0;
    for (const auto& b : banks) {
      for (std::size_t f = 0; f < F; ++f)
        for (float v : b.heat[f].data) h.mean[f] += v;
      count += static_cast<double>(dims_volume(b.dims));
    }
    for (auto& m : h.mean) m /= count;
    for (const auto& b : banks)
      for (std::size_t f = 0; f < F; ++f)
        for (float v : b.heat[f].data) h.stdev[f] += (v - h.mean[f]) * (v - h.mean[f]);
    for (auto& s : h.stdev) s = std::max(std::sqrt(s / count), 1e-6);

    h.heat_w.assign(F, 0.0);
    h.heat_b = std::log(cfg.prior / (1.0 - cfg.prior));
    std::vector<std::vector<float>> xs;
    for (const auto& b : banks) xs.push_back(standardized(b, h));

    std::vector<std::size_t> order(studies.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(cfg.seed, 10 + p));
    std::vector<double> gw(F);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      rng.shuffle(order.begin(), order.end());
      double epoch_loss = 0.0;
      for (std::size_t s : order) {
        const auto& x = xs[s];
        const auto& tgt = targets[s];
        Grid3<double> pred(tgt.heatmap.dims);
        for (std::size_t i = 0; i < pred.size(); ++i) pred.data[i] = sigmoid(heat_logit(h, &x[i * F], F));
        if (report && (epoch == 0 || epoch + 1 == cfg.epochs)) epoch_loss += heatmap_focal_loss(pred, tgt, cfg.loss);
        const auto dy = heatmap_focal_loss_grad(pred, tgt, cfg.loss);
        std::fill(gw.begin(), gw.end(), 0.0);
        double gb = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
          const double g = dy.data[i] * pred.data[i] * (1.0 - pred.data[i]);
          if (g == 0.0) continue;
          gb += g;
          for (std::size_t f = 0; f < F; ++f) gw[f] += g * x[i * F + f];
        }
        double norm = gb * gb;
        for (double v : gw) norm += v * v;
        norm = std::sqrt(norm);
        const double scale = norm > cfg.grad_clip ? cfg.grad_clip / norm : 1.0;
        for (std::size_t f = 0; f < F; ++f) h.heat_w[f] -= cfg.learning_rate * scale * gw[f];
        h.heat_b -= cfg.learning_rate * scale * gb;
      }
      epoch_loss /= static_cast<double>(studies.size());
      if (report) {
        if (epoch == 0) report->first_epoch_loss[p] = epoch_loss;
        report->last_epoch_loss[p] = epoch_loss;
      }
    }

    // Offset and size heads from the centre cells.
    for (int a = 0; a < 3; ++a) {
      std::vector<HeadSample> off, sz;
      for (std::size_t s = 0; s < banks.size(); ++s) {
        for (const auto& c : targets[s].centers) {
          off.push_back({offset_input(banks[s], c, a), targets[s].offsets[a](c[0], c[1], c[2])});
          sz.push_back({size_input(banks[s], c, a), targets[s].sizes[a](c[0], c[1], c[2])});
        }
      }
      std::vector<double> wo{1.0, 0.0, 0.5};
      fit_l1(wo, off, cfg.head_learning_rate, cfg.head_iterations);
      std::copy(wo.begin(), wo.end(), h.offset[a].begin());
      std::vector<double> ws{1.0, 0.0, 0.0};
      fit_l1(ws, sz, cfg.head_learning_rate * 10.0, cfg.head_iterations);
      std::copy(ws.begin(), ws.end(), h.size[a].begin());
    }
  }
  return model;
}

HeadOutputs run_heads(const PhaseHeads& h, const FeatureBank& bank) {
  const std::size_t F = bank.heat.size();
  if (h.heat_w.size() != F || h.mean.size() != F || h.stdev.size() != F) {
    throw std::invalid_argument("detector heads expect " + std::to_string(h.heat_w.size()) + " features, bank has " +
                                std::to_string(F));
  }
  HeadOutputs out;
  out.heatmap = Grid3<double>(bank.dims);
  for (int a = 0; a < 3; ++a) {
    out.offsets[a] = Grid3<double>(bank.dims);
    out.sizes[a] = Grid3<double>(bank.dims);
  }
  const auto x = standardized(bank, h);
  for (std::size_t i = 0; i < out.heatmap.size(); ++i) out.heatmap.data[i] = sigmoid(heat_logit(h, &x[i * F], F));
  const auto& d = bank.dims;
  for (std::size_t z = 0; z < d[2]; ++z)
    for (std::size_t y = 0; y < d[1]; ++y)
      for (std::size_t xx = 0; xx < d[0]; ++xx) {
        const std::array<std::size_t, 3> c{xx, y, z};
        const std::size_t i = out.heatmap.index(xx, y, z);
        for (int a = 0; a < 3; ++a) {
          const auto fo = offset_input(bank, c, a);
          const auto fs = size_input(bank, c, a);
          out.offsets[a].data[i] = std::inner_product(fo.begin(), fo.end(), h.offset[a].begin(), 0.0);
          out.sizes[a].data[i] = std::inner_product(fs.begin(), fs.end(), h.size[a].begin(), 0.0);
        }
      }
  return out;
}

std::vector<DetectionCandidate> detect_phase(const DetectorModel& model, const Volume& vol, std::size_t topk) {
  const auto bank = compute_features(vol, model.features);
  const auto heads = run_heads(model.phases[phase_index(vol.phase)], bank);
  auto cands = decode_peaks(heads.heatmap, heads.offsets, heads.sizes, 1, topk, vol.phase);
  for (auto& c : cands) c.box = center_size_to_box(from_detection_grid(box_to_center_size(c.box), bank.source_dims, bank.dims));
  return cands;
}

std::vector<DetectionCandidate> detect_study(const DetectorModel& model, const std::array<Volume, 4>& phases,
                                             std::size_t topk, double nms_iou) {
  std::vector<DetectionCandidate> pool;
  for (const auto& v : phases) {
    const auto c = detect_phase(model, v, topk);
    pool.insert(pool.end(), c.begin(), c.end());
  }
  auto merged = nms_merge(pool, nms_iou);
  if (merged.size() > topk) merged.resize(topk);
  return merged;
}

std::vector<std::pair<std::string, Tensor64>> detector_parameters(const DetectorModel& model) {
  std::vector<std::pair<std::string, Tensor64>> out;
  for (std::size_t p = 0; p < 4; ++p) {
    const auto& h = model.phases[p];
    const std::string pre = std::string(phase_name(kContrastPhases[p])) + ".";
    const std::size_t F = h.heat_w.size();
    out.emplace_back(pre + "mean", Tensor64({F}, h.mean));
    out.emplace_back(pre + "stdev", Tensor64({F}, h.stdev));
    out.emplace_back(pre + "heat_w", Tensor64({F}, h.heat_w));
    out.emplace_back(pre + "heat_b", Tensor64({1}, h.heat_b));
    Tensor64 off({3, kNumOffsetFeatures + 1}), sz({3, kNumSizeFeatures});
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t j = 0; j <= kNumOffsetFeatures; ++j) off(a, j) = h.offset[a][j];
      for (std::size_t j = 0; j < kNumSizeFeatures; ++j) sz(a, j) = h.size[a][j];
    }
    out.emplace_back(pre + "offset", std::move(off));
    out.emplace_back(pre + "size", std::move(sz));
  }
  return out;
}

DetectorModel detector_from_parameters(const FeatureConfig& features,
                                       const std::vector<std::pair<std::string, Tensor64>>& params) {
  auto find = [&](const std::string& name) -> const Tensor64& {
    for (const auto& [n, t] : params)
      if (n == name) return t;
    throw std::invalid_argument("detector checkpoint lacks tensor '" + name + "'");
  };
  DetectorModel m;
  m.features = features;
  const std::size_t F = num_heat_features(features);
  for (std::size_t p = 0; p < 4; ++p) {
    auto& h = m.phases[p];
    const std::string pre = std::string(phase_name(kContrastPhases[p])) + ".";
    auto vec = [&](const std::string& n, std::size_t len) {
      const auto& t = find(pre + n);
      if (t.shape() != Shape{len}) throw std::invalid_argument("tensor '" + pre + n + "' has shape " + shape_string(t.shape()));
      return t.storage();
    };
    h.mean = vec("mean", F);
    h.stdev = vec("stdev", F);
    h.heat_w = vec("heat_w", F);
    h.heat_b = vec("heat_b", 1)[0];
    const auto& off = find(pre + "offset");
    const auto& sz = find(pre + "size");
    if (off.shape() != Shape{3, kNumOffsetFeatures + 1} || sz.shape() != Shape{3, kNumSizeFeatures}) {
      throw std::invalid_argument("detector head tensors of phase " + pre + " have unexpected shapes");
    }
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t j = 0; j <= kNumOffsetFeatures; ++j) h.offset[a][j] = off(a, j);
      for (std::size_t j = 0; j < kNumSizeFeatures; ++j) h.size[a][j] = sz(a, j);
    }
  }
  return m;
}

}  // namespace dyntex::detect
