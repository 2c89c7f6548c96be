#include "dyntex/cli/gradcheck_suite.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <stdexcept>

#include "dyntex/classify/focal.hpp"
#include "dyntex/classify/model.hpp"
#include "dyntex/detect/losses.hpp"
#include "dyntex/numerics/activation.hpp"
#include "dyntex/numerics/conv.hpp"
#include "dyntex/numerics/gradcheck.hpp"
#include "dyntex/numerics/rng.hpp"

namespace dyntex::cli {
namespace {

using Builder = std::function<ScalarFunction(Rng&, Tensor64& params)>;

struct Registered {
  std::string name;
  Builder build;
  double step = 1e-5;
};

Tensor64 random_tensor(const Shape& shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor64 t(shape);
  for (auto& v : t.storage()) v = rng.uniform(lo, hi);
  return t;
}

double dot(const Tensor64& a, const Tensor64& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Values kept away from the ReLU kink so central differences stay one-sided-free.
Tensor64 away_from_zero(Tensor64 t) {
  for (auto& v : t.storage())
    if (std::abs(v) < 1e-2) v = v < 0 ? -1e-2 : 1e-2;
  return t;
}

ScalarFunction conv_case(Rng& rng, Tensor64& params) {
  const std::size_t stride = 1 + rng.below(2);
  const std::size_t C = 1 + rng.below(3), F = 1 + rng.below(3), k = rng.below(2) ? 3 : 1;
  const std::size_t H = 3 + rng.below(4), W = 3 + rng.below(4);
  auto x = std::make_shared<Tensor64>(random_tensor({C, H, W}, rng));
  auto kr = std::make_shared<Tensor64>(random_tensor({F, C, k, k}, rng));
  auto b = std::make_shared<Tensor64>(random_tensor({F}, rng));
  auto w = std::make_shared<Tensor64>(random_tensor(conv2d_forward(*x, *kr, *b, stride).shape(), rng));
  const Tensor64* parts[] = {x.get(), kr.get(), b.get()};
  params = pack(parts);
  auto like = std::make_shared<std::vector<Tensor64>>(std::vector<Tensor64>{*x, *kr, *b});
  auto split = [like](const Tensor64& p) {
    const Tensor64* l[] = {&(*like)[0], &(*like)[1], &(*like)[2]};
    return unpack(p, l);
  };
  return {[=](const Tensor64& p) {
            const auto u = split(p);
            return dot(conv2d_forward(u[0], u[1], u[2], stride), *w);
          },
          [=](const Tensor64& p) {
            const auto u = split(p);
            const auto g = conv2d_backward(u[0], u[1], *w, stride);
            const Tensor64* gp[] = {&g.input, &g.kernels, &g.bias};
            return pack(gp);
          }};
}

ScalarFunction relu_case(Rng& rng, Tensor64& params) {
  params = away_from_zero(random_tensor({2 + rng.below(10)}, rng));
  auto w = std::make_shared<Tensor64>(random_tensor(params.shape(), rng));
  return {[=](const Tensor64& p) { return dot(relu_forward(p), *w); },
          [=](const Tensor64& p) { return relu_backward(p, *w); }};
}

// Extractor parameters only; the input image is fixed.
ScalarFunction conv_stack_case(Rng& rng, Tensor64& params) {
  const std::size_t C = 1 + rng.below(3);
  const std::vector<std::size_t> widths = {2 + rng.below(2), 2 + rng.below(3)};
  auto ex = std::make_shared<classify::Extractor>(classify::init_extractor(classify::DescriptorMode::Conv, C, widths, rng));
  const std::size_t side = 5 + rng.below(4);
  auto img = std::make_shared<Tensor64>(random_tensor({C, side, side}, rng));
  auto shape_probe = classify::extractor_forward(*ex, *img, nullptr);
  auto w = std::make_shared<Tensor64>(random_tensor(shape_probe.shape(), rng));
  std::vector<const Tensor64*> parts;
  for (const auto& l : ex->layers) {
    parts.push_back(&l.kernels);
    parts.push_back(&l.bias);
  }
  params = pack(parts);
  auto with = [ex](const Tensor64& p) {
    classify::Extractor e = *ex;
    std::vector<const Tensor64*> like;
    for (const auto& l : e.layers) {
      like.push_back(&l.kernels);
      like.push_back(&l.bias);
    }
    const auto u = unpack(p, like);
    for (std::size_t i = 0; i < e.layers.size(); ++i) {
      e.layers[i].kernels = u[2 * i];
      e.layers[i].bias = u[2 * i + 1];
    }
    return e;
  };
  return {[=](const Tensor64& p) { return dot(classify::extractor_forward(with(p), *img, nullptr), *w); },
          [=](const Tensor64& p) {
            const auto e = with(p);
            classify::ExtractorTrace tr;
            classify::extractor_forward(e, *img, &tr);
            const auto g = classify::extractor_backward(e, tr, *w);
            std::vector<const Tensor64*> gp;
            for (std::size_t i = 0; i < g.kernels.size(); ++i) {
              gp.push_back(&g.kernels[i]);
              gp.push_back(&g.bias[i]);
            }
            return pack(gp);
          }};
}

ScalarFunction sadt_case(Rng& rng, Tensor64& params) {
  const std::size_t M = 2 + rng.below(8), K = 1 + rng.below(4), D = 1 + rng.below(5);
  texture::DescriptorField field{random_tensor({M, D}, rng), {1, M}};
  texture::Codebook book = texture::init_codebook(K, D, 0.8, rng);
  for (auto& s : book.smoothing.storage()) s = rng.uniform(0.2, 1.5);
  texture::AggregationMask mask{Tensor64({M}, 0.0)};
  for (auto& d : mask.delta.storage()) d = rng.uniform() < 0.7 ? 1.0 : 0.0;
  mask.delta[0] = 1.0;
  auto w = std::make_shared<Tensor64>(random_tensor({K * D}, rng));
  const Tensor64* parts[] = {&field.descriptors, &book.codewords, &book.smoothing};
  params = pack(parts);
  auto like = std::make_shared<std::vector<Tensor64>>(
      std::vector<Tensor64>{field.descriptors, book.codewords, book.smoothing});
  auto rebuild = [like, grid = field.grid](const Tensor64& p) {
    const Tensor64* l[] = {&(*like)[0], &(*like)[1], &(*like)[2]};
    auto u = unpack(p, l);
    return std::make_pair(texture::DescriptorField{u[0], grid}, texture::Codebook{u[1], u[2]});
  };
  return {[=](const Tensor64& p) {
            const auto [f, b] = rebuild(p);
            return dot(texture::encode_forward(f, b, mask).flattened_normalized, *w);
          },
          [=](const Tensor64& p) {
            const auto [f, b] = rebuild(p);
            const auto e = texture::encode_forward(f, b, mask);
            const auto g = texture::encode_backward(f, b, mask, e, *w);
            const Tensor64* gp[] = {&g.descriptors, &g.codewords, &g.smoothing};
            return pack(gp);
          }};
}

ScalarFunction head_case(Rng& rng, Tensor64& params) {
  const std::size_t C = 2 + rng.below(4), L = 1 + rng.below(12);
  const auto head = classify::init_head(C, L, 0.5, rng);
  const auto enc = random_tensor({L}, rng);
  auto w = std::make_shared<Tensor64>(random_tensor({C}, rng));
  const Tensor64* parts[] = {&enc, &head.weight, &head.bias};
  params = pack(parts);
  auto like = std::make_shared<std::vector<Tensor64>>(std::vector<Tensor64>{enc, head.weight, head.bias});
  auto split = [like](const Tensor64& p) {
    const Tensor64* l[] = {&(*like)[0], &(*like)[1], &(*like)[2]};
    return unpack(p, l);
  };
  return {[=](const Tensor64& p) {
            const auto u = split(p);
            return dot(classify::head_logits(u[0], {u[1], u[2]}), *w);
          },
          [=](const Tensor64& p) {
            const auto u = split(p);
            const auto g = classify::head_backward(u[0], {u[1], u[2]}, *w);
            const Tensor64* gp[] = {&g.input, &g.weight, &g.bias};
            return pack(gp);
          }};
}

// Softmax followed by the class-weighted focal loss, w.r.t. the logits.
ScalarFunction focal_case(Rng& rng, Tensor64& params) {
  const std::size_t C = 2 + rng.below(4);
  params = random_tensor({C}, rng, -2.0, 2.0);
  const std::size_t label = rng.below(C);
  std::vector<double> weights(C);
  for (auto& x : weights) x = rng.uniform(0.5, 5.0);
  const double gamma = rng.below(2) ? 2.0 : rng.uniform(0.0, 3.0);
  return {[=](const Tensor64& p) {
            return classify::weighted_focal_loss(classify::softmax(p), label, weights, gamma);
          },
          [=](const Tensor64& p) {
            return classify::weighted_focal_loss_grad_logits(classify::softmax(p), label, weights, gamma);
          }};
}

// Whole classifier: extractor, encoding and head through the loss.
ScalarFunction model_case(Rng& rng, Tensor64& params) {
  const std::size_t C = 2 + rng.below(3), side = 6 + rng.below(3), in = 2;
  auto model = std::make_shared<classify::ClassifierModel>();
  model->extractor = classify::init_extractor(classify::DescriptorMode::Conv, in, {2, 3}, rng);
  model->codebook = texture::init_codebook(2 + rng.below(2), model->extractor.descriptor_dim(), 0.5, rng);
  model->head = classify::init_head(C, model->codebook.size() * model->codebook.dim(), 0.5, rng);
  auto input = std::make_shared<classify::ClassifierInput>();
  input->image = random_tensor({in, side, side}, rng);
  input->pixel_mask = Tensor64({side, side}, 1.0);
  for (std::size_t i = 0; i < side * side / 3; ++i) input->pixel_mask[rng.below(side * side)] = 0.0;
  const std::size_t label = rng.below(C);
  classify::LossSpec loss;
  for (std::size_t c = 0; c < C; ++c) loss.class_weights.push_back(rng.uniform(0.5, 3.0));
  params = pack(model_parameters(std::as_const(*model)));
  auto with = [model](const Tensor64& p) {
    classify::ClassifierModel m = *model;
    auto ptrs = model_parameters(m);
    std::vector<const Tensor64*> like(ptrs.begin(), ptrs.end());
    const auto u = unpack(p, like);
    for (std::size_t i = 0; i < ptrs.size(); ++i) *ptrs[i] = u[i];
    return m;
  };
  return {[=](const Tensor64& p) { return classify::loss_and_grad(with(p), *input, label, loss, nullptr); },
          [=](const Tensor64& p) {
            std::vector<Tensor64> grads;
            classify::loss_and_grad(with(p), *input, label, loss, &grads);
            std::vector<const Tensor64*> gp;
            for (const auto& g : grads) gp.push_back(&g);
            return pack(gp);
          }};
}

detect::HeatTarget random_target(Rng& rng, const Dims3& dims) {
  std::vector<detect::CenterSize> boxes;
  const std::size_t n = 1 + rng.below(2);
  for (std::size_t i = 0; i < n; ++i) {
    detect::CenterSize cs;
    for (int a = 0; a < 3; ++a) {
      cs.p[a] = rng.uniform(1.0, dims[a] - 1.0);
      cs.s[a] = rng.uniform(2.0, 6.0);
    }
    boxes.push_back(cs);
  }
  return detect::render_targets(boxes, dims, 1, detect::GaussianSpec{rng.uniform(0.8, 2.0), {1.0, 1.0, 2.0}});
}

// Penalty-reduced focal heatmap loss through the logistic output of the heat head.
ScalarFunction heat_case(Rng& rng, Tensor64& params) {
  const Dims3 dims{3 + rng.below(3), 3 + rng.below(3), 2 + rng.below(3)};
  auto tgt = std::make_shared<detect::HeatTarget>(random_target(rng, dims));
  params = random_tensor({dims_volume(dims)}, rng, -3.0, 3.0);
  detect::LossConfig cfg;
  auto sig = [dims](const Tensor64& p) {
    Grid3<double> g(dims);
    for (std::size_t i = 0; i < g.size(); ++i) g.data[i] = 1.0 / (1.0 + std::exp(-p[i]));
    return g;
  };
  return {[=](const Tensor64& p) { return detect::heatmap_focal_loss(sig(p), *tgt, cfg); },
          [=](const Tensor64& p) {
            const auto y = sig(p);
            const auto dy = detect::heatmap_focal_loss_grad(y, *tgt, cfg);
            Tensor64 g(p.shape());
            for (std::size_t i = 0; i < g.size(); ++i) g[i] = dy.data[i] * y.data[i] * (1.0 - y.data[i]);
            return g;
          }};
}

// Size and offset L1 terms, weighted as in the total loss.
ScalarFunction l1_case(Rng& rng, Tensor64& params) {
  const Dims3 dims{3 + rng.below(3), 3 + rng.below(3), 2 + rng.below(3)};
  auto tgt = std::make_shared<detect::HeatTarget>(random_target(rng, dims));
  const std::size_t n = dims_volume(dims);
  params = Tensor64({6 * n});
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < n; ++i) {
      // Keep predictions at least 0.05 from the target so the L1 kink is not crossed.
      const double off = rng.uniform(0.05, 1.0) * (rng.below(2) ? 1.0 : -1.0);
      params[a * n + i] = tgt->offsets[a].data[i] + off;
      params[(3 + a) * n + i] = tgt->sizes[a].data[i] - off;
    }
  detect::LossConfig cfg;
  auto fields = [dims, n](const Tensor64& p, std::size_t base) {
    detect::VectorField v;
    for (std::size_t a = 0; a < 3; ++a) {
      v[a] = Grid3<double>(dims);
      for (std::size_t i = 0; i < n; ++i) v[a].data[i] = p[(base + a) * n + i];
    }
    return v;
  };
  return {[=](const Tensor64& p) {
            return cfg.lambda_off * detect::offset_loss(fields(p, 0), *tgt) +
                   cfg.lambda_size * detect::size_loss(fields(p, 3), *tgt);
          },
          [=](const Tensor64& p) {
            const auto go = detect::l1_center_loss_grad(fields(p, 0), tgt->offsets, *tgt);
            const auto gs = detect::l1_center_loss_grad(fields(p, 3), tgt->sizes, *tgt);
            Tensor64 g(p.shape());
            for (std::size_t a = 0; a < 3; ++a)
              for (std::size_t i = 0; i < n; ++i) {
                g[a * n + i] = cfg.lambda_off * go[a].data[i];
                g[(3 + a) * n + i] = cfg.lambda_size * gs[a].data[i];
              }
            return g;
          }};
}

const std::vector<Registered>& registry() {
  static const std::vector<Registered> r = {
      {"conv2d", conv_case},
      {"relu", relu_case},
      {"conv_stack", conv_stack_case},
      {"sadt_encoding", sadt_case},
      {"classifier_head", head_case},
      {"weighted_focal_loss", focal_case},
      {"classifier_model", model_case},
      // Off-centre cells carry gradients near 1e-7 against an O(1) loss, so
      // a smaller step drowns them in cancellation error.
      {"heatmap_focal_loss", heat_case, 1e-3},
      {"detector_l1_losses", l1_case},
  };
  return r;
}

}  // namespace

std::vector<std::string> gradcheck_names() {
  std::vector<std::string> out;
  for (const auto& r : registry()) out.push_back(r.name);
  return out;
}

std::vector<GradCheckOutcome> run_gradcheck_suite(const GradCheckOptions& opts) {
  if (opts.plant_bug) {
    bool known = false;
    for (const auto& r : registry()) known |= r.name == *opts.plant_bug;
    if (!known) throw std::invalid_argument("gradcheck: unknown check '" + *opts.plant_bug + "'");
  }
  std::vector<GradCheckOutcome> out;
  for (std::size_t c = 0; c < registry().size(); ++c) {
    const auto& reg = registry()[c];
    const auto t0 = std::chrono::steady_clock::now();
    GradCheckOutcome o{reg.name, opts.instances, 0.0, true, 0.0};
    Rng rng(derive_seed(opts.seed, c));
    for (std::size_t i = 0; i < opts.instances; ++i) {
      Tensor64 params;
      ScalarFunction fn = reg.build(rng, params);
      if (opts.plant_bug == reg.name) {
        fn.gradient = [g = fn.gradient](const Tensor64& p) {
          Tensor64 t = g(p);
          for (auto& v : t.storage()) v *= 2.0;
          return t;
        };
      }
      const auto rep = gradcheck(fn, params, opts.step.value_or(reg.step));
      o.max_rel_error = std::max(o.max_rel_error, rep.max_rel_error);
    }
    o.passed = o.max_rel_error < opts.tolerance;
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(o);
  }
  return out;
}

}  // namespace dyntex::cli
