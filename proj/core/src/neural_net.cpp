#include "sentitrade/neural_net.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sentitrade::nn {

namespace {

void check_width(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string{what} + ": expected width " + std::to_string(want) +
                                ", got " + std::to_string(got));
  }
}

double apply(Activation a, double z) { return a == Activation::ReLU ? (z > 0.0 ? z : 0.0) : z; }

// Subgradient 0 at the kink.
double derivative(Activation a, double z) {
  return a == Activation::ReLU ? (z > 0.0 ? 1.0 : 0.0) : 1.0;
}

std::string_view activation_name(Activation a) {
  return a == Activation::ReLU ? "relu" : "identity";
}

}  // namespace

// ---------------------------------------------------------------- Mlp

Mlp::Mlp(std::span<const std::size_t> widths, Activation hidden, Activation output) {
  if (widths.size() < 2) throw std::invalid_argument("an Mlp needs at least input and output widths");
  std::size_t offset = 0;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    if (widths[k] == 0 || widths[k + 1] == 0) throw std::invalid_argument("zero layer width");
    LayerShape shape{widths[k], widths[k + 1], k + 2 == widths.size() ? output : hidden, offset};
    offset += shape.parameter_count();
    layers_.push_back(shape);
  }
  params_.assign(offset, 0.0);
}

void Mlp::init_he_uniform(std::mt19937_64& rng) {
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layers_[k].in));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : weights(k)) w = dist(rng);
    for (double& b : biases(k)) b = 0.0;
  }
}

std::span<double> Mlp::weights(std::size_t layer) {
  const auto& s = layers_.at(layer);
  return std::span<double>(params_).subspan(s.offset, s.weight_count());
}

std::span<double> Mlp::biases(std::size_t layer) {
  const auto& s = layers_.at(layer);
  return std::span<double>(params_).subspan(s.offset + s.weight_count(), s.out);
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  MlpTape tape;
  forward(x, tape);
  return std::move(tape.output);
}

void Mlp::forward(std::span<const double> x, MlpTape& tape) const {
  check_width(x.size(), input_size(), "Mlp::forward");
  tape.inputs.resize(layers_.size());
  tape.pre.resize(layers_.size());
  tape.inputs[0].assign(x.begin(), x.end());
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& s = layers_[k];
    const double* w = params_.data() + s.offset;
    const double* b = w + s.weight_count();
    const auto& in = tape.inputs[k];
    auto& pre = tape.pre[k];
    pre.resize(s.out);
    for (std::size_t o = 0; o < s.out; ++o) {
      const double* row = w + o * s.in;
      double acc = b[o];
      for (std::size_t i = 0; i < s.in; ++i) acc += row[i] * in[i];
      pre[o] = acc;
    }
    auto& next = k + 1 < layers_.size() ? tape.inputs[k + 1] : tape.output;
    next.resize(s.out);
    for (std::size_t o = 0; o < s.out; ++o) next[o] = apply(s.activation, pre[o]);
  }
}

std::vector<double> Mlp::backward(const MlpTape& tape, std::span<const double> grad_out,
                                  std::span<double> grad) const {
  check_width(grad_out.size(), output_size(), "Mlp::backward");
  check_width(grad.size(), params_.size(), "Mlp::backward gradient buffer");
  std::vector<double> upstream(grad_out.begin(), grad_out.end());
  std::vector<double> delta;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const auto& s = layers_[k];
    const auto& pre = tape.pre[k];
    const auto& in = tape.inputs[k];
    delta.resize(s.out);
    for (std::size_t o = 0; o < s.out; ++o) delta[o] = upstream[o] * derivative(s.activation, pre[o]);

    const double* w = params_.data() + s.offset;
    double* gw = grad.data() + s.offset;
    double* gb = gw + s.weight_count();
    std::vector<double> down(s.in, 0.0);
    for (std::size_t o = 0; o < s.out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      if (d == 0.0) continue;
      const double* row = w + o * s.in;
      double* grow = gw + o * s.in;
      for (std::size_t i = 0; i < s.in; ++i) {
        grow[i] += d * in[i];
        down[i] += d * row[i];
      }
    }
    upstream = std::move(down);
  }
  return upstream;
}

void Mlp::relu_pattern(const MlpTape& tape, std::vector<bool>& out) const {
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    if (layers_[k].activation != Activation::ReLU) continue;
    for (double z : tape.pre[k]) out.push_back(z > 0.0);
  }
}

// ------------------------------------------------------ DuelingNetwork

DuelingNetwork::DuelingNetwork(Mlp trunk, Mlp value, Mlp advantage)
    : trunk_(std::move(trunk)), value_(std::move(value)), advantage_(std::move(advantage)) {
  check_width(value_.input_size(), trunk_.output_size(), "dueling value head");
  check_width(advantage_.input_size(), trunk_.output_size(), "dueling advantage head");
  check_width(value_.output_size(), 1, "dueling value head output");
}

void DuelingNetwork::forward(std::span<const double> x, Tape& tape, std::vector<double>& q) const {
  trunk_.forward(x, tape.trunk);
  value_.forward(tape.trunk.output, tape.value);
  advantage_.forward(tape.trunk.output, tape.advantage);
  const auto& a = tape.advantage.output;
  double mean = 0.0;
  for (double v : a) mean += v;
  mean /= static_cast<double>(a.size());
  const double v = tape.value.output[0];
  q.resize(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) q[k] = v + (a[k] - mean);
}

std::vector<double> DuelingNetwork::forward(std::span<const double> x) const {
  Tape tape;
  std::vector<double> q;
  forward(x, tape, q);
  return q;
}

double DuelingNetwork::state_value(std::span<const double> x) const {
  return value_.forward(trunk_.forward(x))[0];
}

double dueling_combine_backward(std::span<const double> grad_q, std::span<double> grad_advantage) {
  check_width(grad_advantage.size(), grad_q.size(), "dueling_combine_backward");
  double total = 0.0;
  for (double g : grad_q) total += g;
  const double mean = total / static_cast<double>(grad_q.size());
  for (std::size_t k = 0; k < grad_q.size(); ++k) grad_advantage[k] = grad_q[k] - mean;
  return total;
}

std::vector<double> DuelingNetwork::backward(const Tape& tape, std::span<const double> grad_q,
                                             Gradients& grad) const {
  if (grad.size() != 3) throw std::invalid_argument("dueling gradient needs 3 blocks");
  std::vector<double> grad_adv(grad_q.size());
  const double grad_v = dueling_combine_backward(grad_q, grad_adv);
  const double gv[1] = {grad_v};
  auto dh = value_.backward(tape.value, gv, grad[1]);
  const auto dh_adv = advantage_.backward(tape.advantage, grad_adv, grad[2]);
  for (std::size_t i = 0; i < dh.size(); ++i) dh[i] += dh_adv[i];
  return trunk_.backward(tape.trunk, dh, grad[0]);
}

// ----------------------------------------------------------------- MSE

MseResult mse_loss(std::span<const double> q_pred, std::size_t action, double target) {
  if (action >= q_pred.size()) throw std::invalid_argument("mse_loss: action index out of range");
  MseResult r;
  const double diff = q_pred[action] - target;
  r.loss = diff * diff;
  r.grad.assign(q_pred.size(), 0.0);
  r.grad[action] = 2.0 * diff;
  return r;
}

// -------------------------------------------------------------- QModel

std::size_t QModel::input_size() const {
  return std::visit([](const auto& n) { return n.input_size(); }, net_);
}

std::size_t QModel::output_size() const {
  return std::visit([](const auto& n) { return n.output_size(); }, net_);
}

std::vector<double> QModel::forward(std::span<const double> x) const {
  return std::visit([&](const auto& n) { return n.forward(x); }, net_);
}

std::vector<std::span<double>> QModel::parameter_blocks() {
  if (auto* m = std::get_if<Mlp>(&net_)) return {m->params()};
  auto& d = std::get<DuelingNetwork>(net_);
  return {d.trunk().params(), d.value().params(), d.advantage().params()};
}

std::vector<std::span<const double>> QModel::parameter_blocks() const {
  if (const auto* m = std::get_if<Mlp>(&net_)) return {m->params()};
  const auto& d = std::get<DuelingNetwork>(net_);
  return {d.trunk().params(), d.value().params(), d.advantage().params()};
}

std::size_t QModel::parameter_count() const {
  std::size_t n = 0;
  for (auto b : parameter_blocks()) n += b.size();
  return n;
}

Gradients QModel::zero_gradients() const {
  Gradients g;
  for (auto b : parameter_blocks()) g.emplace_back(b.size(), 0.0);
  return g;
}

double QModel::accumulate_gradient(std::span<const double> x, std::size_t action, double target,
                                   Gradients& grad, double scale) const {
  // Tapes are reused per thread; training calls this in a tight loop.
  if (const auto* m = std::get_if<Mlp>(&net_)) {
    thread_local MlpTape tape;
    m->forward(x, tape);
    auto mse = mse_loss(tape.output, action, target);
    for (double& g : mse.grad) g *= scale;
    m->backward(tape, mse.grad, grad.at(0));
    return mse.loss;
  }
  const auto& d = std::get<DuelingNetwork>(net_);
  thread_local DuelingNetwork::Tape tape;
  thread_local std::vector<double> q;
  d.forward(x, tape, q);
  auto mse = mse_loss(q, action, target);
  for (double& g : mse.grad) g *= scale;
  d.backward(tape, mse.grad, grad);
  return mse.loss;
}

std::vector<bool> QModel::relu_pattern(std::span<const double> x) const {
  std::vector<bool> out;
  if (const auto* m = std::get_if<Mlp>(&net_)) {
    MlpTape tape;
    m->forward(x, tape);
    m->relu_pattern(tape, out);
    return out;
  }
  const auto& d = std::get<DuelingNetwork>(net_);
  DuelingNetwork::Tape tape;
  std::vector<double> q;
  d.forward(x, tape, q);
  d.trunk().relu_pattern(tape.trunk, out);
  d.value().relu_pattern(tape.value, out);
  d.advantage().relu_pattern(tape.advantage, out);
  return out;
}

// ---------------------------------------------------------- checkpoint

class ModelIo {
 public:
  static void write_mlp(std::ostream& out, const Mlp& m) {
    out << "mlp " << m.layers_.size() << "\n";
    for (const auto& s : m.layers_) {
      out << "layer " << s.in << " " << s.out << " " << activation_name(s.activation) << "\n";
    }
    out << "params " << m.params_.size() << "\n";
    char buf[64];
    for (std::size_t i = 0; i < m.params_.size(); ++i) {
      auto res = std::to_chars(buf, buf + sizeof buf, m.params_[i], std::chars_format::hex);
      out.write(buf, res.ptr - buf);
      out << ((i + 1) % 8 == 0 || i + 1 == m.params_.size() ? '\n' : ' ');
    }
  }

  static Mlp read_mlp(std::istream& in) {
    std::string tag;
    std::size_t n_layers = 0;
    if (!(in >> tag >> n_layers) || tag != "mlp" || n_layers == 0) fail("expected 'mlp <layers>'");
    Mlp m;
    std::size_t offset = 0;
    for (std::size_t k = 0; k < n_layers; ++k) {
      std::string act;
      LayerShape s;
      if (!(in >> tag >> s.in >> s.out >> act) || tag != "layer") fail("expected layer line");
      if (act == "relu") {
        s.activation = Activation::ReLU;
      } else if (act == "identity") {
        s.activation = Activation::Identity;
      } else {
        fail("unknown activation '" + act + "'");
      }
      if (k > 0 && s.in != m.layers_.back().out) fail("layer widths do not chain");
      s.offset = offset;
      offset += s.parameter_count();
      m.layers_.push_back(s);
    }
    std::size_t count = 0;
    if (!(in >> tag >> count) || tag != "params" || count != offset) fail("parameter count mismatch");
    m.params_.resize(count);
    std::string tok;
    for (std::size_t i = 0; i < count; ++i) {
      if (!(in >> tok)) fail("truncated parameter list");
      auto res = std::from_chars(tok.data(), tok.data() + tok.size(), m.params_[i],
                                 std::chars_format::hex);
      if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) fail("bad parameter '" + tok + "'");
    }
    return m;
  }

  [[noreturn]] static void fail(const std::string& what) {
    throw std::runtime_error("checkpoint: " + what);
  }
};

void QModel::save(std::ostream& out) const {
  out << "sentitrade-qmodel 1\n";
  if (const auto* m = std::get_if<Mlp>(&net_)) {
    out << "kind plain\n";
    ModelIo::write_mlp(out, *m);
  } else {
    const auto& d = std::get<DuelingNetwork>(net_);
    out << "kind dueling\n";
    ModelIo::write_mlp(out, d.trunk());
    ModelIo::write_mlp(out, d.value());
    ModelIo::write_mlp(out, d.advantage());
  }
}

QModel QModel::load(std::istream& in) {
  std::string magic, kind_tag, kind;
  int version = 0;
  if (!(in >> magic >> version) || magic != "sentitrade-qmodel") ModelIo::fail("bad header");
  if (version != 1) ModelIo::fail("unsupported version " + std::to_string(version));
  if (!(in >> kind_tag >> kind) || kind_tag != "kind") ModelIo::fail("expected 'kind'");
  if (kind == "plain") return QModel{ModelIo::read_mlp(in)};
  if (kind == "dueling") {
    auto trunk = ModelIo::read_mlp(in);
    auto value = ModelIo::read_mlp(in);
    auto adv = ModelIo::read_mlp(in);
    return QModel{DuelingNetwork{std::move(trunk), std::move(value), std::move(adv)}};
  }
  ModelIo::fail("unknown kind '" + kind + "'");
}

void QModel::save(const std::filesystem::path& path) const {
  std::ostringstream buf;
  save(buf);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << buf.str();
}

QModel QModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load(in);
}

// ----------------------------------------------------------- factories

Mlp make_q_network(std::mt19937_64& rng) {
  const std::size_t widths[] = {kStateWidth, kHiddenWidth, kHiddenWidth, kHiddenWidth, kActionCount};
  Mlp net(widths, Activation::ReLU, Activation::Identity);
  net.init_he_uniform(rng);
  return net;
}

DuelingNetwork make_dueling_q_network(std::mt19937_64& rng) {
  const std::size_t trunk_w[] = {kStateWidth, kHiddenWidth, kHiddenWidth};
  const std::size_t value_w[] = {kHiddenWidth, kHiddenWidth, 1};
  const std::size_t adv_w[] = {kHiddenWidth, kHiddenWidth, kActionCount};
  Mlp trunk(trunk_w, Activation::ReLU, Activation::ReLU);
  Mlp value(value_w, Activation::ReLU, Activation::Identity);
  Mlp adv(adv_w, Activation::ReLU, Activation::Identity);
  trunk.init_he_uniform(rng);
  value.init_he_uniform(rng);
  adv.init_he_uniform(rng);
  return DuelingNetwork{std::move(trunk), std::move(value), std::move(adv)};
}

// ---------------------------------------------------------------- Adam

AdamState AdamState::for_blocks(std::span<const std::span<double>> params, AdamConfig config) {
  AdamState st;
  st.config = config;
  for (auto p : params) {
    st.m.emplace_back(p.size(), 0.0);
    st.v.emplace_back(p.size(), 0.0);
  }
  return st;
}

void adam_step(std::span<const std::span<double>> params, const Gradients& grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: block count mismatch");
  }
  ++state.step;
  const auto& c = state.config;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto p = params[b];
    const auto& g = grads[b];
    auto& m = state.m[b];
    auto& v = state.v[b];
    if (g.size() != p.size() || m.size() != p.size()) {
      throw std::invalid_argument("adam_step: block size mismatch");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

// ------------------------------------------------------ gradient check

namespace {

// Loss (q[action] - target)^2 and the ReLU pattern from a single forward pass.
double probe_loss(const QModel& model, std::span<const double> x, std::size_t action, double target,
                  std::vector<bool>& pattern) {
  pattern.clear();
  std::vector<double> q;
  if (!model.is_dueling()) {
    MlpTape tape;
    model.plain().forward(x, tape);
    model.plain().relu_pattern(tape, pattern);
    q = std::move(tape.output);
  } else {
    const auto& d = model.dueling();
    DuelingNetwork::Tape tape;
    d.forward(x, tape, q);
    d.trunk().relu_pattern(tape.trunk, pattern);
    d.value().relu_pattern(tape.value, pattern);
    d.advantage().relu_pattern(tape.advantage, pattern);
  }
  const double diff = q.at(action) - target;
  return diff * diff;
}

}  // namespace

GradientCheckResult compare_gradients(const QModel& model, std::span<const double> x,
                                      std::size_t action, double target, const Gradients& analytic,
                                      GradientCheckOptions options) {
  QModel probe = model;
  std::vector<bool> base_pattern;
  std::vector<bool> pattern;
  probe_loss(probe, x, action, target, base_pattern);

  GradientCheckResult result;
  auto blocks = probe.parameter_blocks();
  if (analytic.size() != blocks.size()) throw std::invalid_argument("gradient block count mismatch");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (analytic[b].size() != blocks[b].size()) throw std::invalid_argument("gradient block size mismatch");
    for (std::size_t i = 0; i < blocks[b].size(); ++i) {
      double& p = blocks[b][i];
      const double saved = p;
      p = saved + options.step;
      const double plus = probe_loss(probe, x, action, target, pattern);
      bool smooth = pattern == base_pattern;
      p = saved - options.step;
      const double minus = probe_loss(probe, x, action, target, pattern);
      smooth = smooth && pattern == base_pattern;
      p = saved;
      if (!smooth) {
        ++result.skipped_at_kink;
        continue;
      }
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double a = analytic[b][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
      result.max_relative_error = std::max(result.max_relative_error, std::abs(a - numeric) / denom);
      ++result.checked;
    }
  }
  return result;
}

GradientCheckResult gradient_check(const QModel& model, std::span<const double> x,
                                   std::size_t action, double target, GradientCheckOptions options) {
  auto grads = model.zero_gradients();
  model.accumulate_gradient(x, action, target, grads);
  return compare_gradients(model, x, action, target, grads, options);
}

}  // namespace sentitrade::nn
