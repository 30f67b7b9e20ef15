#include "consol/jet_batch.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace consol {

namespace {

constexpr std::uint8_t bit(Channel c) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(c)); }

// tanh through the vectorised exponential; the argument is clamped where
// tanh is already 1 to double precision so exp cannot overflow.
Eigen::ArrayXXd tanh_array(const Eigen::Ref<const Eigen::MatrixXd>& v) {
  const Eigen::ArrayXXd e = (2.0 * v.array().min(20.0).max(-20.0)).exp();
  return (e - 1.0) / (e + 1.0);
}

class BlockView {
 public:
  BlockView(const ChannelSet& channels, Eigen::Index n) : channels_(channels), n_(n) {}

  template <class M>
  auto operator()(M& m, Channel c) const {
    return m.middleCols(static_cast<Eigen::Index>(channels_.slot(c)) * n_, n_).array();
  }

 private:
  const ChannelSet& channels_;
  Eigen::Index n_;
};

Eigen::MatrixXd seed_inputs(std::span<const Point> points, const ChannelSet& channels) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, n * static_cast<Eigen::Index>(channels.count()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point& p = points[static_cast<std::size_t>(i)];
    a(0, i) = p.x;
    a(1, i) = p.z;
    a(2, i) = p.t;
  }
  const std::pair<Channel, Eigen::Index> seeds[] = {
      {Channel::d_x, 0}, {Channel::d_z, 1}, {Channel::d_t, 2}};
  for (const auto& [c, row] : seeds) {
    if (!channels.contains(c)) continue;
    const Eigen::Index off = static_cast<Eigen::Index>(channels.slot(c)) * n;
    a.row(row).segment(off, n).setOnes();
  }
  return a;
}

Eigen::MatrixXd affine(const NetworkParams& params, std::size_t layer, const Eigen::MatrixXd& input,
                       Eigen::Index n) {
  Eigen::MatrixXd z(params.fan_out(layer), input.cols());
  z.noalias() = params.weights(layer) * input;
  z.leftCols(n).colwise() += params.biases(layer);
  return z;
}

// Applies tanh channel-wise to a pre-activation jet block matrix.
Eigen::MatrixXd tanh_forward(const Eigen::MatrixXd& z, const Eigen::ArrayXXd& s,
                             const ChannelSet& channels, Eigen::Index n) {
  const BlockView blk(channels, n);
  Eigen::MatrixXd y(z.rows(), z.cols());
  const Eigen::ArrayXXd p = 1.0 - s.square();
  blk(y, Channel::val) = s;
  for (Channel k : {Channel::d_x, Channel::d_z, Channel::d_t}) {
    if (channels.contains(k)) blk(y, k) = p * blk(z, k);
  }
  for (auto [kk, k] : {std::pair{Channel::d_xx, Channel::d_x}, std::pair{Channel::d_zz, Channel::d_z}}) {
    if (!channels.contains(kk)) continue;
    blk(y, kk) = p * (blk(z, kk) - 2.0 * s * blk(z, k).square());
  }
  return y;
}

// Pulls output cotangents of tanh_forward back to its pre-activation.
Eigen::MatrixXd tanh_backward(const Eigen::MatrixXd& z, const Eigen::ArrayXXd& s,
                              const Eigen::MatrixXd& ybar, const ChannelSet& channels,
                              Eigen::Index n) {
  const BlockView blk(channels, n);
  Eigen::MatrixXd zbar(z.rows(), z.cols());
  const Eigen::ArrayXXd p = 1.0 - s.square();
  Eigen::ArrayXXd sbar = blk(ybar, Channel::val);
  Eigen::ArrayXXd pbar = Eigen::ArrayXXd::Zero(s.rows(), s.cols());
  for (Channel k : {Channel::d_x, Channel::d_z, Channel::d_t}) {
    if (!channels.contains(k)) continue;
    blk(zbar, k) = p * blk(ybar, k);
    pbar += blk(ybar, k) * blk(z, k);
  }
  for (auto [kk, k] : {std::pair{Channel::d_xx, Channel::d_x}, std::pair{Channel::d_zz, Channel::d_z}}) {
    if (!channels.contains(kk)) continue;
    const auto ybar_kk = blk(ybar, kk);
    const auto z_k = blk(z, k);
    const Eigen::ArrayXXd z_k2 = z_k.square();
    blk(zbar, kk) = p * ybar_kk;
    blk(zbar, k) -= 4.0 * s * p * z_k * ybar_kk;
    pbar += ybar_kk * (blk(z, kk) - 2.0 * s * z_k2);
    sbar -= 2.0 * p * z_k2 * ybar_kk;
  }
  sbar -= 2.0 * s * pbar;
  blk(zbar, Channel::val) = p * sbar;
  return zbar;
}

std::vector<Jet> unpack_jets(const Eigen::MatrixXd& out, const ChannelSet& channels, std::size_t n) {
  std::vector<Jet> jets(n);
  for (Channel c : channels.channels()) {
    const std::size_t off = channels.slot(c) * n;
    for (std::size_t i = 0; i < n; ++i) jets[i][c] = out(0, static_cast<Eigen::Index>(off + i));
  }
  return jets;
}

}  // namespace

ChannelSet::ChannelSet(std::initializer_list<Channel> channels) {
  for (Channel c : channels) add(c);
}

ChannelSet ChannelSet::full() {
  ChannelSet s;
  for (Channel c : kAllChannels) s.add(c);
  return s;
}

ChannelSet& ChannelSet::add(Channel c) {
  bits_ |= bit(c);
  if (c == Channel::d_xx) bits_ |= bit(Channel::d_x);
  if (c == Channel::d_zz) bits_ |= bit(Channel::d_z);
  return *this;
}

std::size_t ChannelSet::count() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::size_t ChannelSet::slot(Channel c) const {
  if (!contains(c)) throw std::invalid_argument("ChannelSet::slot: inactive channel");
  const auto below = static_cast<std::uint8_t>(bit(c) - 1u);
  return static_cast<std::size_t>(std::popcount(static_cast<std::uint8_t>(bits_ & below)));
}

std::vector<Channel> ChannelSet::channels() const {
  std::vector<Channel> out;
  for (Channel c : kAllChannels) {
    if (contains(c)) out.push_back(c);
  }
  return out;
}

std::vector<Jet> propagate_jets(const NetworkParams& params, std::span<const Point> points,
                                ChannelSet channels) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a = seed_inputs(points, channels);
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    Eigen::MatrixXd z = affine(params, l, a, n);
    if (l + 1 == params.layer_count()) {
      a = std::move(z);
      break;
    }
    const Eigen::ArrayXXd s = tanh_array(z.leftCols(n));
    a = tanh_forward(z, s, channels, n);
  }
  return unpack_jets(a, channels, points.size());
}

JetTrace::JetTrace(const NetworkParams& params, std::span<const Point> points, ChannelSet channels)
    : params_(&params), channels_(channels), n_points_(points.size()) {
  const auto n = static_cast<Eigen::Index>(n_points_);
  const std::size_t layers = params.layer_count();
  inputs_.reserve(layers);
  pre_.reserve(layers);
  act_.reserve(layers);
  inputs_.push_back(seed_inputs(points, channels_));
  for (std::size_t l = 0; l < layers; ++l) {
    pre_.push_back(affine(params, l, inputs_.back(), n));
    if (l + 1 == layers) break;
    act_.push_back(tanh_array(pre_.back().leftCols(n)));
    inputs_.push_back(tanh_forward(pre_.back(), act_.back(), channels_, n));
  }
}

std::vector<Jet> JetTrace::outputs() const { return unpack_jets(pre_.back(), channels_, n_points_); }

void JetTrace::backward(std::span<const Jet> cotangents, ParamGradient& grad) const {
  if (cotangents.size() != n_points_) throw std::invalid_argument("JetTrace::backward: size mismatch");
  if (grad.size() != params_->parameter_count()) grad.assign(params_->parameter_count(), 0.0);
  const auto n = static_cast<Eigen::Index>(n_points_);
  if (n == 0) return;

  Eigen::MatrixXd zbar(1, n * static_cast<Eigen::Index>(channels_.count()));
  for (Channel c : channels_.channels()) {
    const auto off = static_cast<Eigen::Index>(channels_.slot(c)) * n;
    for (Eigen::Index i = 0; i < n; ++i) zbar(0, off + i) = cotangents[static_cast<std::size_t>(i)][c];
  }

  for (std::size_t l = params_->layer_count(); l-- > 0;) {
    const Eigen::MatrixXd& a = inputs_[l];
    Eigen::Map<RowMatrix> gw(grad.data() + params_->weight_offset(l), params_->fan_out(l),
                             params_->fan_in(l));
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + params_->bias_offset(l), params_->fan_out(l));
    gw.noalias() += zbar * a.transpose();
    gb += zbar.leftCols(n).rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd ybar(params_->fan_in(l), zbar.cols());
    ybar.noalias() = params_->weights(l).transpose() * zbar;
    zbar = tanh_backward(pre_[l - 1], act_[l - 1], ybar, channels_, n);
  }
}

namespace {

JetVar leaf_jet(Tape& tape, const Jet& jet, std::span<const Channel> active) {
  JetVar out;
  for (Channel c : active) out[c] = tape.leaf(jet[c]);
  return out;
}

JetVar constant_jet_var(const Jet& jet) {
  JetVar out;
  for (Channel c : kAllChannels) out[c] = Var(jet[c]);
  return out;
}

}  // namespace

GradientResult param_gradient(const NetworkParams& params, std::span<const JetBatchRequest> batches,
                              const LossBuilder& loss) {
  std::vector<JetTrace> traces;
  traces.reserve(batches.size());
  std::size_t leaves = 0;
  for (const JetBatchRequest& b : batches) {
    traces.emplace_back(params, b.points, b.channels);
    leaves += b.points.size() * b.channels.count();
  }

  Tape tape;
  tape.reserve(4 * leaves + 16, 4 * leaves + 16);
  std::vector<std::vector<JetVar>> jets(batches.size());
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const std::vector<Jet> out = traces[b].outputs();
    const std::vector<Channel> active = batches[b].channels.channels();
    jets[b].reserve(out.size());
    for (const Jet& j : out) jets[b].push_back(leaf_jet(tape, j, active));
  }

  const Var total = loss(tape, jets);
  GradientResult result{total.value(), ParamGradient(params.parameter_count(), 0.0)};
  const std::vector<double> adj = tape.adjoints(total);

  for (std::size_t b = 0; b < batches.size(); ++b) {
    const std::vector<Channel> active = batches[b].channels.channels();
    std::vector<Jet> cot(jets[b].size());
    for (std::size_t i = 0; i < jets[b].size(); ++i) {
      for (Channel c : active) cot[i][c] = adj[jets[b][i][c].index()];
    }
    traces[b].backward(cot, result.grad);
  }
  return result;
}

double evaluate_loss(const NetworkParams& params, std::span<const JetBatchRequest> batches,
                     const LossBuilder& loss) {
  Tape tape;
  std::vector<std::vector<JetVar>> jets(batches.size());
  for (std::size_t b = 0; b < batches.size(); ++b) {
    for (const Jet& j : propagate_jets(params, batches[b].points, batches[b].channels)) {
      jets[b].push_back(constant_jet_var(j));
    }
  }
  return loss(tape, jets).value();
}

}  // namespace consol
