#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "qretail/common.hpp"

namespace qretail {

/// Dense row-major matrix, rows = output units, cols = input units.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// All weights and biases of the feed-forward Q-network plus Adam state.
/// weights[l] has shape (layer_sizes[l+1] x layer_sizes[l]).
struct NetworkParams {
  std::vector<std::size_t> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  std::vector<Matrix> adam_m_weights;
  std::vector<Matrix> adam_v_weights;
  std::vector<std::vector<double>> adam_m_biases;
  std::vector<std::vector<double>> adam_v_biases;
  std::uint64_t adam_step_count = 0;
  std::uint64_t init_seed = 0;

  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t output_dim() const { return layer_sizes.back(); }
  std::size_t layer_count() const { return weights.size(); }
};

/// Per-layer pre-activations and activations kept for the backward pass.
/// activations[0] is the input; activations.back() holds the Q-values.
struct ForwardTrace {
  std::vector<std::vector<double>> activations;
  std::vector<std::vector<double>> pre_activations;

  const std::vector<double>& output() const { return activations.back(); }
};

/// Gradients shaped exactly like the parameters they differentiate.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
};

/// Hidden layers rectify, the output layer is linear.
inline double relu(double x) { return x > 0.0 ? x : 0.0; }
inline double relu_grad(double x) { return x > 0.0 ? 1.0 : 0.0; }

/// Xavier-uniform weights drawn deterministically from the seed, zero biases,
/// zero Adam moments.
inline NetworkParams init_network(const std::vector<std::size_t>& layer_sizes,
                                  std::uint64_t seed) {
  if (layer_sizes.size() < 2) {
    throw config_error("network needs at least input and output layers");
  }
  for (std::size_t n : layer_sizes) {
    if (n < 1) throw config_error("every layer size must be >= 1");
  }

  NetworkParams params;
  params.layer_sizes = layer_sizes;
  params.init_seed = seed;
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));

  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const std::size_t fan_in = layer_sizes[l];
    const std::size_t fan_out = layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);

    Matrix w(fan_out, fan_in);
    for (double& v : w.data) v = dist(rng);
    params.weights.push_back(std::move(w));
    params.biases.emplace_back(fan_out, 0.0);

    params.adam_m_weights.emplace_back(fan_out, fan_in);
    params.adam_v_weights.emplace_back(fan_out, fan_in);
    params.adam_m_biases.emplace_back(fan_out, 0.0);
    params.adam_v_biases.emplace_back(fan_out, 0.0);
  }
  return params;
}

inline ForwardTrace forward(const NetworkParams& params,
                            const StateVector& input) {
  if (input.size() != params.input_dim()) {
    throw contract_error("forward: input has length " +
                         std::to_string(input.size()) + ", network expects " +
                         std::to_string(params.input_dim()));
  }
  if (!all_finite(input)) {
    throw contract_error("forward: input contains non-finite entries");
  }

  ForwardTrace trace;
  trace.activations.reserve(params.layer_sizes.size());
  trace.pre_activations.reserve(params.layer_count());
  trace.activations.push_back(input);

  const std::size_t last = params.layer_count() - 1;
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    const Matrix& w = params.weights[l];
    const std::vector<double>& prev = trace.activations.back();
    std::vector<double> z(w.rows);
    for (std::size_t i = 0; i < w.rows; ++i) {
      double sum = params.biases[l][i];
      const double* row = w.data.data() + i * w.cols;
      for (std::size_t j = 0; j < w.cols; ++j) sum += row[j] * prev[j];
      z[i] = sum;
    }
    std::vector<double> a(z);
    if (l != last) {
      for (double& v : a) v = relu(v);
    }
    trace.pre_activations.push_back(std::move(z));
    trace.activations.push_back(std::move(a));
  }
  return trace;
}

inline Gradients make_zero_gradients(const NetworkParams& params) {
  Gradients grads;
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    grads.weights.emplace_back(params.weights[l].rows, params.weights[l].cols);
    grads.biases.emplace_back(params.biases[l].size(), 0.0);
  }
  return grads;
}

/// Adds the gradients of 0.5*(Q(s,a) - y)^2 on the masked action into `acc`.
/// Non-masked outputs contribute nothing.
inline void backward_accumulate(const NetworkParams& params,
                                const ForwardTrace& trace,
                                const std::vector<double>& target,
                                const std::vector<bool>& action_mask,
                                Gradients& acc) {
  const std::size_t out_dim = params.output_dim();
  if (target.size() != out_dim || action_mask.size() != out_dim) {
    throw contract_error("backward: target/mask length must equal output dim");
  }
  std::size_t mask_count = 0;
  for (bool m : action_mask) mask_count += m ? 1 : 0;
  if (mask_count != 1) {
    throw contract_error("backward: mask must select exactly one action, got " +
                         std::to_string(mask_count));
  }

  const std::size_t last = params.layer_count() - 1;
  std::vector<double> delta(out_dim);
  for (std::size_t i = 0; i < out_dim; ++i) {
    delta[i] = action_mask[i] ? trace.output()[i] - target[i] : 0.0;
  }

  for (std::size_t l = last + 1; l-- > 0;) {
    const Matrix& w = params.weights[l];
    const std::vector<double>& prev = trace.activations[l];
    Matrix& gw = acc.weights[l];
    std::vector<double>& gb = acc.biases[l];
    for (std::size_t i = 0; i < w.rows; ++i) {
      const double d = delta[i];
      if (d == 0.0) continue;
      gb[i] += d;
      double* grow = gw.data.data() + i * gw.cols;
      for (std::size_t j = 0; j < w.cols; ++j) grow[j] += d * prev[j];
    }
    if (l == 0) break;
    std::vector<double> delta_prev(w.cols, 0.0);
    for (std::size_t i = 0; i < w.rows; ++i) {
      const double d = delta[i];
      if (d == 0.0) continue;
      const double* row = w.data.data() + i * w.cols;
      for (std::size_t j = 0; j < w.cols; ++j) delta_prev[j] += row[j] * d;
    }
    const std::vector<double>& z = trace.pre_activations[l - 1];
    for (std::size_t j = 0; j < delta_prev.size(); ++j) {
      delta_prev[j] *= relu_grad(z[j]);
    }
    delta = std::move(delta_prev);
  }
}

inline Gradients backward(const NetworkParams& params, const ForwardTrace& trace,
                          const std::vector<double>& target,
                          const std::vector<bool>& action_mask) {
  Gradients grads = make_zero_gradients(params);
  backward_accumulate(params, trace, target, action_mask, grads);
  return grads;
}

inline void scale_gradients(Gradients& grads, double factor) {
  for (Matrix& w : grads.weights) {
    for (double& v : w.data) v *= factor;
  }
  for (std::vector<double>& b : grads.biases) {
    for (double& v : b) v *= factor;
  }
}

inline bool gradients_finite(const Gradients& grads) {
  for (const Matrix& w : grads.weights) {
    if (!all_finite(w.data)) return false;
  }
  for (const std::vector<double>& b : grads.biases) {
    if (!all_finite(b)) return false;
  }
  return true;
}

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam update, applied in place. Shapes never change.
inline void adam_step(NetworkParams& params, const Gradients& grads,
                      double learning_rate, const AdamOptions& opt = {}) {
  if (learning_rate <= 0.0) {
    throw contract_error("adam_step: learning rate must be positive");
  }
  if (grads.weights.size() != params.layer_count() ||
      grads.biases.size() != params.layer_count()) {
    throw contract_error("adam_step: gradient layer count mismatch");
  }
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    if (grads.weights[l].rows != params.weights[l].rows ||
        grads.weights[l].cols != params.weights[l].cols ||
        grads.biases[l].size() != params.biases[l].size()) {
      throw contract_error("adam_step: gradient shape mismatch at layer " +
                           std::to_string(l));
    }
  }
  if (!gradients_finite(grads)) {
    throw numeric_error("adam_step: non-finite gradient");
  }

  params.adam_step_count += 1;
  const double t = static_cast<double>(params.adam_step_count);
  const double corr1 = 1.0 - std::pow(opt.beta1, t);
  const double corr2 = 1.0 - std::pow(opt.beta2, t);

  auto update = [&](double& p, double g, double& m, double& v) {
    m = opt.beta1 * m + (1.0 - opt.beta1) * g;
    v = opt.beta2 * v + (1.0 - opt.beta2) * g * g;
    const double m_hat = m / corr1;
    const double v_hat = v / corr2;
    p -= learning_rate * m_hat / (std::sqrt(v_hat) + opt.epsilon);
  };

  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    Matrix& w = params.weights[l];
    const Matrix& gw = grads.weights[l];
    Matrix& mw = params.adam_m_weights[l];
    Matrix& vw = params.adam_v_weights[l];
    for (std::size_t k = 0; k < w.data.size(); ++k) {
      update(w.data[k], gw.data[k], mw.data[k], vw.data[k]);
    }
    std::vector<double>& b = params.biases[l];
    const std::vector<double>& gb = grads.biases[l];
    std::vector<double>& mb = params.adam_m_biases[l];
    std::vector<double>& vb = params.adam_v_biases[l];
    for (std::size_t k = 0; k < b.size(); ++k) {
      update(b[k], gb[k], mb[k], vb[k]);
    }
  }
}

namespace detail {

inline std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_double_full(values[i]);
  }
  return out;
}

inline std::vector<double> parse_doubles(const std::string& text,
                                         std::size_t expected,
                                         const std::string& key) {
  std::vector<std::string> fields = split_fields(text);
  if (fields.size() != expected) {
    throw data_error("key '" + key + "' expects " + std::to_string(expected) +
                     " values, found " + std::to_string(fields.size()));
  }
  std::vector<double> out(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) out[i] = parse_double(fields[i]);
  return out;
}

}  // namespace detail

/// Emits `<prefix>.*` key/value lines; weights row-major, 17 significant
/// digits so load reproduces every parameter exactly.
inline void save_network(std::ostream& out, const NetworkParams& params,
                         const std::string& prefix) {
  out << prefix << ".layer_sizes";
  for (std::size_t n : params.layer_sizes) out << ' ' << n;
  out << '\n';
  out << prefix << ".adam_step " << params.adam_step_count << '\n';
  out << prefix << ".init_seed " << params.init_seed << '\n';
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    const std::string tag = std::to_string(l);
    out << prefix << ".w" << tag << ' '
        << detail::join_doubles(params.weights[l].data) << '\n';
    out << prefix << ".b" << tag << ' '
        << detail::join_doubles(params.biases[l]) << '\n';
    out << prefix << ".mw" << tag << ' '
        << detail::join_doubles(params.adam_m_weights[l].data) << '\n';
    out << prefix << ".vw" << tag << ' '
        << detail::join_doubles(params.adam_v_weights[l].data) << '\n';
    out << prefix << ".mb" << tag << ' '
        << detail::join_doubles(params.adam_m_biases[l]) << '\n';
    out << prefix << ".vb" << tag << ' '
        << detail::join_doubles(params.adam_v_biases[l]) << '\n';
  }
}

inline NetworkParams load_network(const KvDocument& doc,
                                  const std::string& prefix) {
  std::vector<std::string> size_fields =
      split_fields(kv_require(doc, prefix + ".layer_sizes"));
  if (size_fields.size() < 2) {
    throw data_error("model file: layer_sizes needs at least two entries");
  }
  std::vector<std::size_t> layer_sizes;
  for (const std::string& f : size_fields) {
    layer_sizes.push_back(static_cast<std::size_t>(parse_uint(f)));
  }

  NetworkParams params = init_network(layer_sizes, 0);
  params.adam_step_count = parse_uint(kv_require(doc, prefix + ".adam_step"));
  params.init_seed = parse_uint(kv_require(doc, prefix + ".init_seed"));

  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    const std::string tag = std::to_string(l);
    const std::size_t n_w = params.weights[l].data.size();
    const std::size_t n_b = params.biases[l].size();
    params.weights[l].data = detail::parse_doubles(
        kv_require(doc, prefix + ".w" + tag), n_w, prefix + ".w" + tag);
    params.biases[l] = detail::parse_doubles(
        kv_require(doc, prefix + ".b" + tag), n_b, prefix + ".b" + tag);
    params.adam_m_weights[l].data = detail::parse_doubles(
        kv_require(doc, prefix + ".mw" + tag), n_w, prefix + ".mw" + tag);
    params.adam_v_weights[l].data = detail::parse_doubles(
        kv_require(doc, prefix + ".vw" + tag), n_w, prefix + ".vw" + tag);
    params.adam_m_biases[l] = detail::parse_doubles(
        kv_require(doc, prefix + ".mb" + tag), n_b, prefix + ".mb" + tag);
    params.adam_v_biases[l] = detail::parse_doubles(
        kv_require(doc, prefix + ".vb" + tag), n_b, prefix + ".vb" + tag);
  }
  return params;
}

inline void save_network_file(std::ostream& out, const NetworkParams& params) {
  out << "qretail_network 1\n";
  save_network(out, params, "net");
}

inline NetworkParams load_network_file(std::istream& in) {
  KvDocument doc = read_kv_document(in);
  if (kv_require(doc, "qretail_network") != "1") {
    throw data_error("unsupported network file version");
  }
  return load_network(doc, "net");
}

}  // namespace qretail
