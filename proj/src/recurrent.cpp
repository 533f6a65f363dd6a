#include "trackadapt/recurrent.hpp"

#include <cmath>

#include "trackadapt/errors.hpp"
#include "trackadapt/history_bank.hpp"
#include "trackadapt/rng.hpp"

namespace trackadapt {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;
using ConstVec = Eigen::Map<const Eigen::VectorXd>;
using MutVec = Eigen::Map<Eigen::VectorXd>;

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

void fill_uniform(std::span<double> dst, double bound, Rng& rng) {
  for (double& v : dst) v = rng.uniform(-bound, bound);
}

}  // namespace

std::string to_string(PredictorArch a) {
  switch (a) {
    case PredictorArch::kf: return "kf";
    case PredictorArch::ekf: return "ekf";
    case PredictorArch::mlp: return "mlp";
    case PredictorArch::lstm: return "lstm";
  }
  return "unknown";
}

PredictorArch parse_arch(const std::string& name) {
  if (name == "kf") return PredictorArch::kf;
  if (name == "ekf") return PredictorArch::ekf;
  if (name == "mlp") return PredictorArch::mlp;
  if (name == "lstm") return PredictorArch::lstm;
  throw ConfigError("unknown predictor architecture '" + name + "' (expected kf|ekf|mlp|lstm)");
}

void SequenceNet::set_parameters(std::span<const double> p) {
  if (p.size() != params_.size()) {
    throw ConfigError("parameter vector has " + std::to_string(p.size()) + " entries, expected " +
                      std::to_string(params_.size()));
  }
  std::copy(p.begin(), p.end(), params_.begin());
}

Eigen::MatrixXd SequenceNet::forward(const Eigen::MatrixXd& inputs) const {
  std::unique_ptr<Cache> cache;
  return forward_train(inputs, cache);
}

std::array<double, 4> SequenceNet::predict_delta(std::span<const double> window) const {
  const Eigen::MatrixXd in = ConstVec(window.data(), static_cast<Eigen::Index>(window.size()));
  const Eigen::MatrixXd out = forward(in);
  return {out(0, 0), out(1, 0), out(2, 0), out(3, 0)};
}

// ---- LSTM ----

LstmPredictor::LstmPredictor(int context, int layers, int hidden)
    : SequenceNet(count_parameters(layers, hidden)), context_(context), layers_(layers), hidden_(hidden) {
  if (context < 1 || layers < 1 || hidden < 1) throw ConfigError("LSTM dimensions must be positive");
}

std::size_t LstmPredictor::count_parameters(int layers, int hidden) {
  std::size_t n = 0;
  const std::size_t h = static_cast<std::size_t>(hidden);
  for (int l = 0; l < layers; ++l) {
    const std::size_t in = l == 0 ? kStateFeatures : h;
    n += 4 * h * in + 4 * h * h + 8 * h;
  }
  return n + 4 * h + 4;
}

LstmPredictor::LayerOffsets LstmPredictor::layer(int l) const {
  const std::size_t h = static_cast<std::size_t>(hidden_);
  std::size_t off = 0;
  for (int i = 0; i < l; ++i) {
    const std::size_t in = i == 0 ? kStateFeatures : h;
    off += 4 * h * in + 4 * h * h + 8 * h;
  }
  const int in = l == 0 ? kStateFeatures : hidden_;
  const std::size_t w_ih = off;
  const std::size_t w_hh = w_ih + 4 * h * static_cast<std::size_t>(in);
  const std::size_t b_ih = w_hh + 4 * h * h;
  const std::size_t b_hh = b_ih + 4 * h;
  return {w_ih, w_hh, b_ih, b_hh, in};
}

std::size_t LstmPredictor::head_offset() const {
  const LayerOffsets last = layer(layers_ - 1);
  return last.b_hh + 4 * static_cast<std::size_t>(hidden_);
}

namespace {

struct LstmCache final : SequenceNet::Cache {
  int batch = 0;
  std::vector<Eigen::MatrixXd> inputs;  // per layer: in x (k*B)
  std::vector<Eigen::MatrixXd> gates;   // per layer: 4H x (k*B), post-activation
  std::vector<Eigen::MatrixXd> cells;   // H x (k*B)
  std::vector<Eigen::MatrixXd> tanh_cells;
  std::vector<Eigen::MatrixXd> hiddens;  // H x (k*B)
};

}  // namespace

Eigen::MatrixXd LstmPredictor::forward_train(const Eigen::MatrixXd& inputs, std::unique_ptr<Cache>& cache) const {
  const int k = context_;
  const int h = hidden_;
  if (inputs.rows() != k * kStateFeatures) throw DomainError("LSTM input rows do not match context * 8");
  const Eigen::Index b = inputs.cols();
  const Eigen::Index kb = k * b;

  auto c = std::make_unique<LstmCache>();
  c->batch = static_cast<int>(b);

  Eigen::MatrixXd x(kStateFeatures, kb);
  for (int t = 0; t < k; ++t) x.middleCols(t * b, b) = inputs.middleRows(t * kStateFeatures, kStateFeatures);

  for (int l = 0; l < layers_; ++l) {
    const LayerOffsets o = layer(l);
    const ConstMap w_ih(params_.data() + o.w_ih, 4 * h, o.in);
    const ConstMap w_hh(params_.data() + o.w_hh, 4 * h, h);
    const Eigen::VectorXd bias = ConstVec(params_.data() + o.b_ih, 4 * h) + ConstVec(params_.data() + o.b_hh, 4 * h);

    Eigen::MatrixXd pre = w_ih * x;
    pre.colwise() += bias;

    Eigen::MatrixXd gates(4 * h, kb), cells(h, kb), tcells(h, kb), hid(h, kb);
    Eigen::MatrixXd h_prev = Eigen::MatrixXd::Zero(h, b);
    Eigen::MatrixXd c_prev = Eigen::MatrixXd::Zero(h, b);
    for (int t = 0; t < k; ++t) {
      Eigen::MatrixXd z = pre.middleCols(t * b, b);
      z.noalias() += w_hh * h_prev;
      auto g = gates.middleCols(t * b, b);
      g.topRows(2 * h) = sigmoid(z.topRows(2 * h));
      g.middleRows(2 * h, h) = z.middleRows(2 * h, h).array().tanh().matrix();
      g.bottomRows(h) = sigmoid(z.bottomRows(h));
      const auto ig = g.topRows(h).array();
      const auto fg = g.middleRows(h, h).array();
      const auto gg = g.middleRows(2 * h, h).array();
      const auto og = g.bottomRows(h).array();
      c_prev = (fg * c_prev.array() + ig * gg).matrix();
      cells.middleCols(t * b, b) = c_prev;
      tcells.middleCols(t * b, b) = c_prev.array().tanh().matrix();
      h_prev = (og * tcells.middleCols(t * b, b).array()).matrix();
      hid.middleCols(t * b, b) = h_prev;
    }
    c->inputs.push_back(std::move(x));
    c->gates.push_back(std::move(gates));
    c->cells.push_back(std::move(cells));
    c->tanh_cells.push_back(std::move(tcells));
    x = hid;
    c->hiddens.push_back(std::move(hid));
  }

  const std::size_t ho = head_offset();
  const ConstMap w_head(params_.data() + ho, 4, h);
  const ConstVec b_head(params_.data() + ho + 4 * static_cast<std::size_t>(h), 4);
  Eigen::MatrixXd out = w_head * c->hiddens.back().middleCols((k - 1) * b, b);
  out.colwise() += b_head;
  cache = std::move(c);
  return out;
}

void LstmPredictor::backward(const Cache& base, const Eigen::MatrixXd& d_out, std::span<double> grad) const {
  const auto& c = dynamic_cast<const LstmCache&>(base);
  if (grad.size() != params_.size()) throw DomainError("gradient buffer size mismatch");
  const int k = context_;
  const int h = hidden_;
  const Eigen::Index b = c.batch;
  const Eigen::Index kb = k * b;

  const std::size_t ho = head_offset();
  const ConstMap w_head(params_.data() + ho, 4, h);
  MutMap g_head(grad.data() + ho, 4, h);
  MutVec gb_head(grad.data() + ho + 4 * static_cast<std::size_t>(h), 4);
  const auto h_last = c.hiddens.back().middleCols((k - 1) * b, b);
  g_head.noalias() += d_out * h_last.transpose();
  gb_head += d_out.rowwise().sum();

  Eigen::MatrixXd d_above = Eigen::MatrixXd::Zero(h, kb);
  d_above.middleCols((k - 1) * b, b) = w_head.transpose() * d_out;

  for (int l = layers_ - 1; l >= 0; --l) {
    const LayerOffsets o = layer(l);
    const ConstMap w_ih(params_.data() + o.w_ih, 4 * h, o.in);
    const ConstMap w_hh(params_.data() + o.w_hh, 4 * h, h);
    const Eigen::MatrixXd& gates = c.gates[static_cast<std::size_t>(l)];
    const Eigen::MatrixXd& cells = c.cells[static_cast<std::size_t>(l)];
    const Eigen::MatrixXd& tcells = c.tanh_cells[static_cast<std::size_t>(l)];
    const Eigen::MatrixXd& hid = c.hiddens[static_cast<std::size_t>(l)];

    Eigen::MatrixXd dz(4 * h, kb);
    Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(h, b);
    Eigen::MatrixXd dc_next = Eigen::MatrixXd::Zero(h, b);
    MutMap g_hh(grad.data() + o.w_hh, 4 * h, h);

    for (int t = k - 1; t >= 0; --t) {
      const auto g = gates.middleCols(t * b, b);
      const auto ig = g.topRows(h).array();
      const auto fg = g.middleRows(h, h).array();
      const auto gg = g.middleRows(2 * h, h).array();
      const auto og = g.bottomRows(h).array();
      const auto tc = tcells.middleCols(t * b, b).array();

      const Eigen::ArrayXXd dh = d_above.middleCols(t * b, b).array() + dh_next.array();
      const Eigen::ArrayXXd dc = dc_next.array() + dh * og * (1.0 - tc.square());
      auto dzt = dz.middleCols(t * b, b);
      dzt.topRows(h) = (dc * gg * ig * (1.0 - ig)).matrix();
      if (t > 0) {
        dzt.middleRows(h, h) = (dc * cells.middleCols((t - 1) * b, b).array() * fg * (1.0 - fg)).matrix();
      } else {
        dzt.middleRows(h, h).setZero();
      }
      dzt.middleRows(2 * h, h) = (dc * ig * (1.0 - gg.square())).matrix();
      dzt.bottomRows(h) = (dh * tc * og * (1.0 - og)).matrix();

      dc_next = (dc * fg).matrix();
      if (t > 0) {
        dh_next.noalias() = w_hh.transpose() * dzt;
        g_hh.noalias() += dzt * hid.middleCols((t - 1) * b, b).transpose();
      }
    }

    MutMap g_ih(grad.data() + o.w_ih, 4 * h, o.in);
    g_ih.noalias() += dz * c.inputs[static_cast<std::size_t>(l)].transpose();
    const Eigen::VectorXd db = dz.rowwise().sum();
    MutVec(grad.data() + o.b_ih, 4 * h) += db;
    MutVec(grad.data() + o.b_hh, 4 * h) += db;
    if (l > 0) d_above.noalias() = w_ih.transpose() * dz;
  }
}

void LstmPredictor::initialize(std::uint64_t seed) {
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_));
  const std::size_t ho = head_offset();
  fill_uniform(std::span<double>(params_).first(ho), bound, rng);
  fill_uniform(std::span<double>(params_).subspan(ho), bound, rng);
}

// ---- MLP ----

MlpPredictor::MlpPredictor(int context, int hidden1, int hidden2)
    : SequenceNet(count_parameters(context, hidden1, hidden2)), context_(context), hidden1_(hidden1), hidden2_(hidden2) {
  if (context < 1 || hidden1 < 1 || hidden2 < 1) throw ConfigError("MLP dimensions must be positive");
}

std::size_t MlpPredictor::count_parameters(int context, int hidden1, int hidden2) {
  const std::size_t in = static_cast<std::size_t>(context) * kStateFeatures;
  const std::size_t h1 = static_cast<std::size_t>(hidden1), h2 = static_cast<std::size_t>(hidden2);
  return h1 * in + h1 + h2 * h1 + h2 + 4 * h2 + 4;
}

namespace {

struct MlpCache final : SequenceNet::Cache {
  Eigen::MatrixXd x, a1, a2;
};

struct MlpLayout {
  std::size_t w1, b1, w2, b2, w3, b3;
};

MlpLayout mlp_layout(int in, int h1, int h2) {
  MlpLayout m{};
  m.w1 = 0;
  m.b1 = m.w1 + static_cast<std::size_t>(h1) * static_cast<std::size_t>(in);
  m.w2 = m.b1 + static_cast<std::size_t>(h1);
  m.b2 = m.w2 + static_cast<std::size_t>(h2) * static_cast<std::size_t>(h1);
  m.w3 = m.b2 + static_cast<std::size_t>(h2);
  m.b3 = m.w3 + 4 * static_cast<std::size_t>(h2);
  return m;
}

}  // namespace

Eigen::MatrixXd MlpPredictor::forward_train(const Eigen::MatrixXd& inputs, std::unique_ptr<Cache>& cache) const {
  const int in = context_ * kStateFeatures;
  if (inputs.rows() != in) throw DomainError("MLP input rows do not match context * 8");
  const MlpLayout m = mlp_layout(in, hidden1_, hidden2_);
  const double* p = params_.data();
  auto c = std::make_unique<MlpCache>();
  c->x = inputs;
  Eigen::MatrixXd z1 = ConstMap(p + m.w1, hidden1_, in) * inputs;
  z1.colwise() += ConstVec(p + m.b1, hidden1_);
  c->a1 = z1.array().tanh().matrix();
  Eigen::MatrixXd z2 = ConstMap(p + m.w2, hidden2_, hidden1_) * c->a1;
  z2.colwise() += ConstVec(p + m.b2, hidden2_);
  c->a2 = z2.array().tanh().matrix();
  Eigen::MatrixXd out = ConstMap(p + m.w3, 4, hidden2_) * c->a2;
  out.colwise() += ConstVec(p + m.b3, 4);
  cache = std::move(c);
  return out;
}

void MlpPredictor::backward(const Cache& base, const Eigen::MatrixXd& d_out, std::span<double> grad) const {
  const auto& c = dynamic_cast<const MlpCache&>(base);
  if (grad.size() != params_.size()) throw DomainError("gradient buffer size mismatch");
  const int in = context_ * kStateFeatures;
  const MlpLayout m = mlp_layout(in, hidden1_, hidden2_);
  const double* p = params_.data();
  double* g = grad.data();

  MutMap(g + m.w3, 4, hidden2_).noalias() += d_out * c.a2.transpose();
  MutVec(g + m.b3, 4) += d_out.rowwise().sum();
  const Eigen::MatrixXd dz2 =
      ((ConstMap(p + m.w3, 4, hidden2_).transpose() * d_out).array() * (1.0 - c.a2.array().square())).matrix();
  MutMap(g + m.w2, hidden2_, hidden1_).noalias() += dz2 * c.a1.transpose();
  MutVec(g + m.b2, hidden2_) += dz2.rowwise().sum();
  const Eigen::MatrixXd dz1 =
      ((ConstMap(p + m.w2, hidden2_, hidden1_).transpose() * dz2).array() * (1.0 - c.a1.array().square())).matrix();
  MutMap(g + m.w1, hidden1_, in).noalias() += dz1 * c.x.transpose();
  MutVec(g + m.b1, hidden1_) += dz1.rowwise().sum();
}

void MlpPredictor::initialize(std::uint64_t seed) {
  Rng rng(seed);
  const int in = context_ * kStateFeatures;
  const MlpLayout m = mlp_layout(in, hidden1_, hidden2_);
  std::span<double> p(params_);
  const double b1 = 1.0 / std::sqrt(static_cast<double>(in));
  const double b2 = 1.0 / std::sqrt(static_cast<double>(hidden1_));
  const double b3 = 1.0 / std::sqrt(static_cast<double>(hidden2_));
  fill_uniform(p.subspan(m.w1, m.w2 - m.w1), b1, rng);
  fill_uniform(p.subspan(m.w2, m.w3 - m.w2), b2, rng);
  fill_uniform(p.subspan(m.w3), b3, rng);
}

}  // namespace trackadapt
